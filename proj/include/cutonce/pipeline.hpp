// Copyright 2026 The CutOnce Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <vector>

#include "cutonce/config.hpp"
#include "cutonce/feature_io.hpp"
#include "cutonce/instances.hpp"
#include "cutonce/saliency.hpp"
#include "cutonce/spectral.hpp"

namespace cutonce {

/// Wall time per stage, in seconds.
struct StageTimings {
  double affinity = 0.0;
  double spectral = 0.0;
  double saliency = 0.0;
  double instances = 0.0;

  double total() const noexcept { return affinity + spectral + saliency + instances; }
};

/// Everything computed between the Fiedler vector and the final masks, kept for inspection.
struct Intermediates {
  EigenResult eigen;
  SaliencyField field;
  Bipartition split;
  ComponentSet components;
  std::vector<int> selected;
};

struct ImageResult {
  std::vector<InstanceMask> masks;
  StageTimings timings;
};

/// Single NCut pass on one grid: affinity, Fiedler vector, boundary augmentation,
/// orientation and split, connected components, rank filter, upsampling and scores.
/// The grid is normalized here if it is not already.
ImageResult run_pipeline(const FeatureGrid& grid, const PipelineConfig& config,
                         Intermediates* capture = nullptr);

}  // namespace cutonce
