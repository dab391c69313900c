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

#include "cutonce/saliency.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>

#include "cutonce/errors.hpp"

namespace cutonce {

namespace {

// Neighbour offsets in raster order; the summation order is part of the contract
// (results are reproducible bit for bit).
constexpr std::array<std::pair<int, int>, 4> kFour = {{{-1, 0}, {0, -1}, {0, 1}, {1, 0}}};
constexpr std::array<std::pair<int, int>, 8> kEight = {
    {{-1, -1}, {-1, 0}, {-1, 1}, {0, -1}, {0, 1}, {1, -1}, {1, 0}, {1, 1}}};

template <std::size_t K>
RealMap boundary_with(const RealMap& raw, const std::array<std::pair<int, int>, K>& offsets) {
  const auto rows = static_cast<int>(raw.rows());
  const auto cols = static_cast<int>(raw.cols());
  RealMap out(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const double centre = raw(r, c);
      double sum = 0.0;
      for (const auto& [dr, dc] : offsets) {
        const int rr = std::clamp(r + dr, 0, rows - 1);
        const int cc = std::clamp(c + dc, 0, cols - 1);
        sum += std::abs(centre - raw(rr, cc));
      }
      out(r, c) = sum / static_cast<double>(K);
    }
  }
  return out;
}

int corners_in(const BoolMap& mask) {
  const auto last_r = mask.rows() - 1;
  const auto last_c = mask.cols() - 1;
  return int{mask(0, 0)} + int{mask(0, last_c)} + int{mask(last_r, 0)} + int{mask(last_r, last_c)};
}

}  // namespace

std::string_view to_string(FlipReason reason) {
  switch (reason) {
    case FlipReason::corner_rule:
      return "corner_rule";
    case FlipReason::maxmin_rule:
      return "maxmin_rule";
    case FlipReason::none:
      break;
  }
  return "none";
}

RealMap boundary_field(const RealMap& raw, int neighborhood) {
  if (raw.rows() < 2 || raw.cols() < 2) {
    throw ParameterError("boundary_field: map must be at least 2x2");
  }
  if (neighborhood == 4) return boundary_with(raw, kFour);
  if (neighborhood == 8) return boundary_with(raw, kEight);
  throw ParameterError("boundary_field: neighborhood must be 4 or 8, got " + std::to_string(neighborhood));
}

RealMap augment(const RealMap& raw, const RealMap& boundary) {
  if (raw.rows() != boundary.rows() || raw.cols() != boundary.cols()) {
    throw ContractError("augment: raw and boundary maps differ in shape");
  }
  return raw - boundary;
}

SaliencyField saliency_field(const RealMap& raw, int neighborhood) {
  SaliencyField field;
  field.raw = raw;
  field.boundary = boundary_field(raw, neighborhood);
  field.augmented = augment(field.raw, field.boundary);
  field.neighborhood = neighborhood;
  return field;
}

Bipartition orient_and_split(const RealMap& augmented) {
  if (augmented.size() == 0) throw ContractError("orient_and_split: empty map");
  Bipartition out;
  const BoolMap candidate = augmented > augmented.mean();
  if (corners_in(candidate) >= 3) {
    out.flipped = true;
    out.flip_reason = FlipReason::corner_rule;
  } else if (std::abs(augmented.maxCoeff()) < std::abs(augmented.minCoeff())) {
    out.flipped = true;
    out.flip_reason = FlipReason::maxmin_rule;
  }
  out.oriented = out.flipped ? RealMap(-augmented) : augmented;
  out.threshold = out.oriented.mean();
  out.foreground = out.oriented > out.threshold;
  return out;
}

}  // namespace cutonce
