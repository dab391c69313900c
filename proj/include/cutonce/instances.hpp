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

#include "cutonce/feature_io.hpp"
#include "cutonce/types.hpp"

namespace cutonce {

/// Tight axis-aligned box in pixels.
struct PixelBox {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;

  friend bool operator==(const PixelBox&, const PixelBox&) = default;
};

/// Maximal 4-connected foreground regions with their saliency sums.
///
/// Labels are 1..count in first-encounter raster order (0 is background);
/// `sums[i]` and `areas[i]` belong to label i + 1.
struct ComponentSet {
  LabelMap labels;
  int count = 0;
  std::vector<double> sums;
  std::vector<int> areas;
  std::vector<int> order;  // labels sorted by sum descending, ties by lower label
};

struct InstanceMask {
  BoolMap patch_mask;
  BoolMap pixel_mask;
  PixelBox bbox;
  double saliency_sum = 0.0;
  int rank = 0;
  double score = 1.0;
};

/// 4-connected labeling of `foreground` only (sums and areas left empty, order by label).
ComponentSet label_components(const BoolMap& foreground);

/// 4-connected labeling plus per-component sums of `saliency` and the descending order.
ComponentSet connected_components(const BoolMap& foreground, const RealMap& saliency);

/// Minimal prefix of `components.order` whose cumulative share of the total sum reaches `tau`.
/// Sums are clamped at zero for the ratio; if the clamped total is zero the single
/// largest-area component is returned. Throws ParameterError unless 0 < tau < 1.
std::vector<int> rank_filter(const ComponentSet& components, double tau);

/// Bilinear (half-pixel centres) resampling of the 0/1 patch map to the original image
/// size, foreground where the interpolated value is >= 0.5 (ties within 1e-9 count as foreground).
BoolMap upsample_mask(const BoolMap& patch_mask, const GridGeometry& geometry);

/// Scores 1 - k / (2N - 2) for k = 0..N-1, or {1.0} when N == 1.
std::vector<double> assign_scores(int n_masks);

/// Tight box of a non-empty mask; returns a zero box for an empty one.
PixelBox bounding_box(const BoolMap& mask);

/// Components selected by the rank filter as ranked, scored instance masks. Masks that vanish
/// when upsampled are dropped before scores are assigned.
std::vector<InstanceMask> extract_instances(const ComponentSet& components, double tau,
                                            const GridGeometry& geometry);

}  // namespace cutonce
