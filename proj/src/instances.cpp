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

#include "cutonce/instances.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cutonce/errors.hpp"

namespace cutonce {

namespace {

int find_root(std::vector<int>& parent, int x) {
  while (parent[static_cast<std::size_t>(x)] != x) {
    auto& p = parent[static_cast<std::size_t>(x)];
    p = parent[static_cast<std::size_t>(p)];
    x = p;
  }
  return x;
}

struct AxisSample {
  int lo;
  int hi;
  double frac;
};

// Half-pixel-centre mapping from `out_size` destination cells onto `in_size` source cells.
std::vector<AxisSample> axis_samples(int out_size, int in_size) {
  std::vector<AxisSample> samples(static_cast<std::size_t>(out_size));
  const double scale = static_cast<double>(in_size) / static_cast<double>(out_size);
  for (int i = 0; i < out_size; ++i) {
    const double src = std::clamp((i + 0.5) * scale - 0.5, 0.0, static_cast<double>(in_size - 1));
    const int lo = static_cast<int>(std::floor(src));
    samples[static_cast<std::size_t>(i)] = {lo, std::min(lo + 1, in_size - 1), src - lo};
  }
  return samples;
}

}  // namespace

ComponentSet label_components(const BoolMap& foreground) {
  const auto rows = static_cast<int>(foreground.rows());
  const auto cols = static_cast<int>(foreground.cols());
  ComponentSet out;
  out.labels = LabelMap::Zero(rows, cols);

  // Two-pass union-find over provisional labels.
  std::vector<int> parent{0};
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (!foreground(r, c)) continue;
      const int up = r > 0 ? out.labels(r - 1, c) : 0;
      const int left = c > 0 ? out.labels(r, c - 1) : 0;
      if (up == 0 && left == 0) {
        const int fresh = static_cast<int>(parent.size());
        parent.push_back(fresh);
        out.labels(r, c) = fresh;
      } else if (up != 0 && left != 0) {
        const int a = find_root(parent, up);
        const int b = find_root(parent, left);
        parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
        out.labels(r, c) = std::min(a, b);
      } else {
        out.labels(r, c) = up != 0 ? up : left;
      }
    }
  }

  std::vector<int> final_label(parent.size(), 0);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const int provisional = out.labels(r, c);
      if (provisional == 0) continue;
      const auto root = static_cast<std::size_t>(find_root(parent, provisional));
      if (final_label[root] == 0) final_label[root] = ++out.count;
      out.labels(r, c) = final_label[root];
    }
  }
  out.order.resize(static_cast<std::size_t>(out.count));
  std::iota(out.order.begin(), out.order.end(), 1);
  return out;
}

ComponentSet connected_components(const BoolMap& foreground, const RealMap& saliency) {
  if (foreground.rows() != saliency.rows() || foreground.cols() != saliency.cols()) {
    throw ContractError("connected_components: foreground and saliency differ in shape");
  }
  ComponentSet out = label_components(foreground);
  out.sums.assign(static_cast<std::size_t>(out.count), 0.0);
  out.areas.assign(static_cast<std::size_t>(out.count), 0);
  for (Eigen::Index r = 0; r < out.labels.rows(); ++r) {
    for (Eigen::Index c = 0; c < out.labels.cols(); ++c) {
      const int label = out.labels(r, c);
      if (label == 0) continue;
      out.sums[static_cast<std::size_t>(label - 1)] += saliency(r, c);
      out.areas[static_cast<std::size_t>(label - 1)] += 1;
    }
  }
  std::stable_sort(out.order.begin(), out.order.end(), [&](int a, int b) {
    return out.sums[static_cast<std::size_t>(a - 1)] > out.sums[static_cast<std::size_t>(b - 1)];
  });
  return out;
}

std::vector<int> rank_filter(const ComponentSet& components, double tau) {
  if (!(tau > 0.0 && tau < 1.0)) {
    throw ParameterError("rank_filter: tau must lie in (0, 1), got " + std::to_string(tau));
  }
  if (components.count == 0) return {};
  if (components.sums.size() != static_cast<std::size_t>(components.count) ||
      components.order.size() != static_cast<std::size_t>(components.count)) {
    throw ContractError("rank_filter: component set lacks sums or order");
  }

  const auto clamped = [&](int label) {
    return std::max(0.0, components.sums[static_cast<std::size_t>(label - 1)]);
  };
  // The total is accumulated in rank order so the final prefix sum equals it exactly.
  double total = 0.0;
  for (int label : components.order) total += clamped(label);

  if (!(total > 0.0)) {
    int best = 1;
    for (int label = 2; label <= components.count; ++label) {
      if (components.areas.at(static_cast<std::size_t>(label - 1)) >
          components.areas.at(static_cast<std::size_t>(best - 1))) {
        best = label;
      }
    }
    return {best};
  }

  std::vector<int> selected;
  double cumulative = 0.0;
  for (int label : components.order) {
    selected.push_back(label);
    cumulative += clamped(label);
    if (cumulative / total >= tau) break;
  }
  return selected;
}

BoolMap upsample_mask(const BoolMap& patch_mask, const GridGeometry& geometry) {
  const auto rows = static_cast<int>(patch_mask.rows());
  const auto cols = static_cast<int>(patch_mask.cols());
  const auto ys = axis_samples(geometry.orig_height, rows);
  const auto xs = axis_samples(geometry.orig_width, cols);

  BoolMap out(geometry.orig_height, geometry.orig_width);
  for (int y = 0; y < geometry.orig_height; ++y) {
    const auto& sy = ys[static_cast<std::size_t>(y)];
    for (int x = 0; x < geometry.orig_width; ++x) {
      const auto& sx = xs[static_cast<std::size_t>(x)];
      const double m00 = patch_mask(sy.lo, sx.lo) ? 1.0 : 0.0;
      const double m01 = patch_mask(sy.lo, sx.hi) ? 1.0 : 0.0;
      const double m10 = patch_mask(sy.hi, sx.lo) ? 1.0 : 0.0;
      const double m11 = patch_mask(sy.hi, sx.hi) ? 1.0 : 0.0;
      const double top = (1.0 - sx.frac) * m00 + sx.frac * m01;
      const double bottom = (1.0 - sx.frac) * m10 + sx.frac * m11;
      // Exact ties at 0.5 land on either side depending on rounding; count them as foreground.
      out(y, x) = (1.0 - sy.frac) * top + sy.frac * bottom >= 0.5 - 1e-9;
    }
  }
  return out;
}

std::vector<double> assign_scores(int n_masks) {
  if (n_masks < 1) throw ParameterError("assign_scores: need at least one mask");
  if (n_masks == 1) return {1.0};
  std::vector<double> scores(static_cast<std::size_t>(n_masks));
  const double denom = static_cast<double>(2 * n_masks - 2);
  for (int k = 0; k < n_masks; ++k) scores[static_cast<std::size_t>(k)] = 1.0 - static_cast<double>(k) / denom;
  return scores;
}

PixelBox bounding_box(const BoolMap& mask) {
  int min_r = static_cast<int>(mask.rows());
  int min_c = static_cast<int>(mask.cols());
  int max_r = -1;
  int max_c = -1;
  for (int r = 0; r < mask.rows(); ++r) {
    for (int c = 0; c < mask.cols(); ++c) {
      if (!mask(r, c)) continue;
      min_r = std::min(min_r, r);
      max_r = std::max(max_r, r);
      min_c = std::min(min_c, c);
      max_c = std::max(max_c, c);
    }
  }
  if (max_r < 0) return {};
  return {min_c, min_r, max_c - min_c + 1, max_r - min_r + 1};
}

std::vector<InstanceMask> extract_instances(const ComponentSet& components, double tau,
                                            const GridGeometry& geometry) {
  std::vector<InstanceMask> masks;
  for (int label : rank_filter(components, tau)) {
    InstanceMask mask;
    mask.patch_mask = components.labels == label;
    mask.pixel_mask = upsample_mask(mask.patch_mask, geometry);
    mask.bbox = bounding_box(mask.pixel_mask);
    if (mask.bbox.width == 0) continue;
    mask.saliency_sum = components.sums[static_cast<std::size_t>(label - 1)];
    masks.push_back(std::move(mask));
  }
  if (masks.empty()) return masks;
  const auto scores = assign_scores(static_cast<int>(masks.size()));
  for (std::size_t i = 0; i < masks.size(); ++i) {
    masks[i].rank = static_cast<int>(i);
    masks[i].score = scores[i];
  }
  return masks;
}

}  // namespace cutonce
