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

#include <string_view>

#include "cutonce/types.hpp"

namespace cutonce {

enum class FlipReason { none, corner_rule, maxmin_rule };

std::string_view to_string(FlipReason reason);

/// Raw Fiedler map, its boundary field and the boundary-augmented field.
struct SaliencyField {
  RealMap raw;
  RealMap boundary;
  RealMap augmented;
  int neighborhood = 8;
};

/// Foreground/background split of an oriented saliency map.
struct Bipartition {
  RealMap oriented;
  BoolMap foreground;
  double threshold = 0.0;  // arithmetic mean of `oriented`
  bool flipped = false;
  FlipReason flip_reason = FlipReason::none;
};

/// Mean absolute difference between each cell and its 4- or 8-neighbours, with the map
/// edge-replicated so out-of-range neighbours take the value of the nearest border cell.
/// Throws ParameterError for maps smaller than 2x2 or a neighbourhood other than 4 or 8.
RealMap boundary_field(const RealMap& raw, int neighborhood = 8);

/// Elementwise raw - boundary. Throws ContractError on shape mismatch.
RealMap augment(const RealMap& raw, const RealMap& boundary);

/// raw, boundary_field(raw), augment(...) in one go.
SaliencyField saliency_field(const RealMap& raw, int neighborhood = 8);

/// Orients the map so the foreground is the object side, then splits at the mean.
///
/// The candidate foreground is every cell above the mean. The map is negated when that
/// candidate covers three or more of the four corner cells, or otherwise when
/// |max| < |min|. Cells exactly at the mean go to the background.
Bipartition orient_and_split(const RealMap& augmented);

}  // namespace cutonce
