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

#include "cutonce/pipeline.hpp"

#include <chrono>
#include <optional>

#include "cutonce/affinity.hpp"

namespace cutonce {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

ImageResult run_pipeline(const FeatureGrid& grid, const PipelineConfig& config, Intermediates* capture) {
  config.validate();
  std::optional<FeatureGrid> normalized_copy;
  if (!grid.normalized()) normalized_copy.emplace(normalize(grid));
  const FeatureGrid& features = normalized_copy ? *normalized_copy : grid;

  ImageResult result;
  auto start = Clock::now();
  EigenResult eigen;
  {
    const AffinityGraph graph = build_affinity(features, config.affinity);
    result.timings.affinity = seconds_since(start);
    start = Clock::now();
    eigen = solve_fiedler(graph, config.solver);
    result.timings.spectral = seconds_since(start);
  }

  start = Clock::now();
  SaliencyField field =
      saliency_field(to_map(eigen.fiedler, features.height(), features.width()), config.neighborhood);
  Bipartition split = orient_and_split(field.augmented);
  result.timings.saliency = seconds_since(start);

  start = Clock::now();
  ComponentSet components = connected_components(split.foreground, split.oriented);
  result.masks = extract_instances(components, config.tau_filter, features.geometry());
  result.timings.instances = seconds_since(start);

  if (capture != nullptr) {
    capture->selected = rank_filter(components, config.tau_filter);
    capture->eigen = std::move(eigen);
    capture->field = std::move(field);
    capture->split = std::move(split);
    capture->components = std::move(components);
  }
  return result;
}

}  // namespace cutonce
