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

#include <algorithm>
#include <random>
#include <set>

#include "doctest.h"

#include "cutonce/errors.hpp"
#include "cutonce/instances.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace cutonce;

namespace {

ComponentSet from_sums(const std::vector<double>& sums) {
  // one single-patch component per sum, laid out with gaps on one row
  const int n = static_cast<int>(sums.size());
  BoolMap fg = BoolMap::Constant(1, 2 * n, false);
  RealMap sal = RealMap::Zero(1, 2 * n);
  for (int i = 0; i < n; ++i) {
    fg(0, 2 * i) = true;
    sal(0, 2 * i) = sums[i];
  }
  return connected_components(fg, sal);
}

}  // namespace

TEST_CASE("diagonal neighbours are separate components") {
  BoolMap fg = BoolMap::Constant(2, 2, false);
  fg(0, 0) = fg(1, 1) = true;
  CHECK(label_components(fg).count == 2);
}

TEST_CASE("full and empty foreground") {
  const ComponentSet full = label_components(BoolMap::Constant(7, 5, true));
  CHECK(full.count == 1);
  CHECK((full.labels == 1).all());
  const ComponentSet none = connected_components(BoolMap::Constant(3, 3, false), RealMap::Zero(3, 3));
  CHECK(none.count == 0);
  CHECK(none.order.empty());
  CHECK(rank_filter(none, 0.95).empty());
}

TEST_CASE("labels match a flood fill on random masks") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    const BoolMap fg = testing::random_mask(rng, 60, 60, 0.3 + 0.02 * trial);
    int count = 0;
    const LabelMap ref = oracle::flood_fill(fg, &count);
    const ComponentSet cs = label_components(fg);
    CHECK(cs.count == count);
    CHECK((cs.labels == ref).all());
  }
}

TEST_CASE("a U shape merges through the union-find pass") {
  BoolMap fg = BoolMap::Constant(3, 3, false);
  fg(0, 0) = fg(1, 0) = fg(2, 0) = fg(2, 1) = fg(2, 2) = fg(1, 2) = fg(0, 2) = true;
  const ComponentSet cs = label_components(fg);
  CHECK(cs.count == 1);
}

TEST_CASE("components are disjoint, maximal and carry sums of the field") {
  std::mt19937_64 rng(32);
  const BoolMap fg = testing::random_mask(rng, 20, 25, 0.45);
  const RealMap sal = testing::random_map(rng, 20, 25);
  const ComponentSet cs = connected_components(fg, sal);
  REQUIRE(cs.count > 3);
  std::vector<double> sums(cs.count, 0.0);
  for (int r = 0; r < 20; ++r)
    for (int c = 0; c < 25; ++c) {
      CHECK((cs.labels(r, c) != 0) == fg(r, c));
      if (cs.labels(r, c) != 0) sums[cs.labels(r, c) - 1] += sal(r, c);
      // 4-adjacent foreground cells share a label
      if (r + 1 < 20 && fg(r, c) && fg(r + 1, c)) CHECK(cs.labels(r, c) == cs.labels(r + 1, c));
      if (c + 1 < 25 && fg(r, c) && fg(r, c + 1)) CHECK(cs.labels(r, c) == cs.labels(r, c + 1));
    }
  for (int i = 0; i < cs.count; ++i) CHECK(cs.sums[i] == doctest::Approx(sums[i]).epsilon(1e-12));
  for (std::size_t i = 1; i < cs.order.size(); ++i)
    CHECK(cs.sums[cs.order[i - 1] - 1] >= cs.sums[cs.order[i] - 1]);
}

TEST_CASE("rank filter worked examples") {
  CHECK(rank_filter(from_sums({5, 3, 1.5, 0.5}), 0.95) == std::vector<int>{1, 2, 3});
  CHECK(rank_filter(from_sums({0.5, 1.5, 3, 5}), 0.95) == std::vector<int>{4, 3, 2});
  CHECK(rank_filter(from_sums({2.0}), 0.01) == std::vector<int>{1});
  CHECK(rank_filter(from_sums({2.0}), 0.99) == std::vector<int>{1});
  CHECK_THROWS_AS(rank_filter(from_sums({1.0}), 0.0), ParameterError);
  CHECK_THROWS_AS(rank_filter(from_sums({1.0}), 1.0), ParameterError);
}

TEST_CASE("rank filter clamps negative sums and falls back to the largest area") {
  CHECK(rank_filter(from_sums({4, -3, 1}), 0.8) == std::vector<int>{1});
  CHECK(rank_filter(from_sums({4, -3, 1}), 0.9) == std::vector<int>{1, 3});

  BoolMap fg = BoolMap::Constant(1, 7, false);
  fg(0, 0) = fg(0, 2) = fg(0, 3) = fg(0, 5) = true;
  RealMap sal = RealMap::Constant(1, 7, -1.0);
  const ComponentSet cs = connected_components(fg, sal);
  CHECK(rank_filter(cs, 0.95) == std::vector<int>{2});
}

TEST_CASE("rank filter matches the linear scan oracle") {
  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> u(-0.5, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> sums(1 + trial % 12);
    for (auto& s : sums) s = u(rng);
    const ComponentSet cs = from_sums(sums);
    const double tau = std::uniform_real_distribution<double>(0.05, 0.99)(rng);
    CHECK(rank_filter(cs, tau) == oracle::rank_filter(cs.sums, cs.areas, tau));
  }
}

TEST_CASE("rank filter is monotone in tau") {
  std::mt19937_64 rng(34);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> sums(2 + trial % 9);
    for (auto& s : sums) s = u(rng);
    const ComponentSet cs = from_sums(sums);
    std::vector<int> previous;
    for (double tau = 0.05; tau < 1.0; tau += 0.05) {
      const auto sel = rank_filter(cs, tau);
      const std::set<int> now(sel.begin(), sel.end()), before(previous.begin(), previous.end());
      CHECK(std::includes(now.begin(), now.end(), before.begin(), before.end()));
      CHECK(sel.size() >= previous.size());
      previous = sel;
    }
  }
}

TEST_CASE("scores") {
  CHECK(assign_scores(1) == std::vector<double>{1.0});
  CHECK(assign_scores(3) == std::vector<double>{1.0, 0.75, 0.5});
  for (int n = 2; n <= 100; ++n) {
    const auto s = assign_scores(n);
    CHECK(s.front() == 1.0);
    CHECK(s.back() == 0.5);
    for (int k = 1; k < n; ++k) CHECK(s[k] < s[k - 1]);
  }
  CHECK_THROWS_AS(assign_scores(0), ParameterError);
}

TEST_CASE("all-true patch mask upsamples to all-true") {
  GridGeometry g = testing::square_geometry(5, 6);
  g.orig_width = 101;
  g.orig_height = 77;
  const BoolMap px = upsample_mask(BoolMap::Constant(5, 6, true), g);
  CHECK(px.rows() == 77);
  CHECK(px.cols() == 101);
  CHECK(px.all());
  CHECK_FALSE(upsample_mask(BoolMap::Constant(5, 6, false), g).any());
}

TEST_CASE("single patch upsamples to a blob inside its cell") {
  const GridGeometry g = testing::square_geometry(6, 6);
  BoolMap patch = BoolMap::Constant(6, 6, false);
  patch(2, 3) = true;
  const BoolMap px = upsample_mask(patch, g);
  CHECK((px == oracle::upsample(patch, 48, 48)).all());
  const PixelBox box = bounding_box(px);
  CHECK(box.x >= 24);
  CHECK(box.y >= 16);
  CHECK(box.x + box.width <= 32);
  CHECK(box.y + box.height <= 24);
  // centred on the cell: symmetric about its centre
  CHECK(box.x - 24 == 32 - (box.x + box.width));
  CHECK(box.y - 16 == 24 - (box.y + box.height));
  CHECK(px.count() >= 32);
}

TEST_CASE("upsampling matches the reference on random masks and geometries") {
  std::mt19937_64 rng(35);
  std::uniform_int_distribution<int> grid(2, 12), pixels(3, 140);
  for (int trial = 0; trial < 60; ++trial) {
    const int h = grid(rng), w = grid(rng);
    GridGeometry g = testing::square_geometry(h, w);
    g.orig_height = pixels(rng);
    g.orig_width = pixels(rng);
    const BoolMap patch = testing::random_mask(rng, h, w, 0.4);
    CHECK((upsample_mask(patch, g) == oracle::upsample(patch, g.orig_height, g.orig_width)).all());
  }
}

TEST_CASE("checkerboard survives upsampling then patch-centre sampling") {
  const GridGeometry g = testing::square_geometry(7, 9);
  BoolMap patch(7, 9);
  for (int r = 0; r < 7; ++r)
    for (int c = 0; c < 9; ++c) patch(r, c) = (r + c) % 2 == 0;
  const BoolMap px = upsample_mask(patch, g);
  for (int r = 0; r < 7; ++r)
    for (int c = 0; c < 9; ++c) CHECK(px(8 * r + 4, 8 * c + 4) == patch(r, c));
}

TEST_CASE("bounding boxes") {
  BoolMap m = BoolMap::Constant(10, 12, false);
  CHECK(bounding_box(m) == PixelBox{});
  m(2, 3) = m(7, 9) = true;
  CHECK(bounding_box(m) == PixelBox{3, 2, 7, 6});
}

TEST_CASE("extracted instances are ranked, scored, tight and disjoint") {
  std::mt19937_64 rng(36);
  for (int trial = 0; trial < 20; ++trial) {
    const BoolMap fg = testing::random_mask(rng, 12, 14, 0.35);
    RealMap sal = testing::random_map(rng, 12, 14).abs();
    const ComponentSet cs = connected_components(fg, sal);
    if (cs.count == 0) continue;
    const auto masks = extract_instances(cs, 0.95, testing::square_geometry(12, 14));
    REQUIRE_FALSE(masks.empty());
    const auto scores = assign_scores(static_cast<int>(masks.size()));
    BoolMap seen = BoolMap::Constant(12, 14, false);
    for (std::size_t i = 0; i < masks.size(); ++i) {
      CHECK(masks[i].rank == static_cast<int>(i));
      CHECK(masks[i].score == scores[i]);
      if (i > 0) CHECK(masks[i].saliency_sum <= masks[i - 1].saliency_sum);
      CHECK(masks[i].bbox == bounding_box(masks[i].pixel_mask));
      CHECK(masks[i].pixel_mask.any());
      CHECK_FALSE((seen && masks[i].patch_mask).any());
      seen = seen || masks[i].patch_mask;
    }
  }
}

TEST_CASE("masks that vanish when upsampled are dropped before scoring") {
  // a 1-patch component on a 16x16 grid shown at 4x4 pixels disappears
  GridGeometry g = testing::square_geometry(16, 16);
  g.orig_height = g.orig_width = 4;
  BoolMap fg = BoolMap::Constant(16, 16, false);
  fg.block(0, 0, 8, 16) = true;
  fg(12, 5) = true;
  const RealMap sal = RealMap::Constant(16, 16, 1.0);
  const ComponentSet cs = connected_components(fg, sal);
  REQUIRE(cs.count == 2);
  const auto masks = extract_instances(cs, 0.999, g);
  REQUIRE(masks.size() == 1);
  CHECK(masks[0].score == 1.0);
  CHECK(masks[0].pixel_mask.rows() == 4);
}
