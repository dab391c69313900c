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

#include "test_support.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include <Eigen/QR>

namespace cutonce::testing {

namespace fs = std::filesystem;

TempDir::TempDir() {
  std::string pattern = (fs::temp_directory_path() / "cutonce-test-XXXXXX").string();
  if (mkdtemp(pattern.data()) == nullptr) throw std::runtime_error("mkdtemp failed");
  path_ = pattern;
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

GridGeometry square_geometry(int height, int width, int patch_size) {
  GridGeometry g;
  g.patch_size = patch_size;
  g.resized_width = g.orig_width = width * patch_size;
  g.resized_height = g.orig_height = height * patch_size;
  return g;
}

FeatureGrid random_grid(std::mt19937_64& rng, int height, int width, int dim, const std::string& id) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd f(height * width, dim);
  for (Eigen::Index i = 0; i < f.size(); ++i) f.data()[i] = normal(rng);
  return FeatureGrid(id, std::move(f), height, width, square_geometry(height, width));
}

namespace {

struct Rect {
  int r0, c0, h, w;
};

bool conflicts(const Rect& a, const Rect& b) {
  // at least one background patch between the two rectangles
  return a.r0 <= b.r0 + b.h && b.r0 <= a.r0 + a.h && a.c0 <= b.c0 + b.w && b.c0 <= a.c0 + a.w;
}

Eigen::MatrixXd cluster_centres(std::mt19937_64& rng, int dim, int count, double cosine) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd g(dim, count + 1);
  for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = normal(rng);
  Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ() *
                      Eigen::MatrixXd::Identity(dim, count + 1);
  // shared direction q.col(count) gives every pair exactly the requested cosine
  Eigen::MatrixXd c(dim, count);
  for (int i = 0; i < count; ++i)
    c.col(i) = std::sqrt(cosine) * q.col(count) + std::sqrt(1.0 - cosine) * q.col(i);
  return c;
}

}  // namespace

PlantedScene planted_scene(std::mt19937_64& rng, int height, int width, int dim, int n_objects,
                           double max_center_cosine, const std::string& id) {
  if (n_objects < 1 || dim < n_objects + 2) throw std::invalid_argument("planted_scene: bad sizes");
  const int n = height * width;
  // comparable object sizes with the background as the largest region
  const double budget = std::uniform_real_distribution<double>(0.25, 0.36)(rng) * n / n_objects;
  std::vector<Rect> rects;
  int restarts = 0;
  for (int attempt = 0; static_cast<int>(rects.size()) < n_objects; ++attempt) {
    if (attempt > 2000) {
      if (++restarts > 50) throw std::invalid_argument("planted_scene: objects do not fit the grid");
      rects.clear();
      attempt = 0;
    }
    const double aspect = std::uniform_real_distribution<double>(0.6, 1.6)(rng);
    int h = std::max(4, static_cast<int>(std::lround(std::sqrt(budget * aspect))));
    int w = std::max(4, static_cast<int>(std::lround(budget / h)));
    h = std::min(h, height - 2);
    w = std::min(w, width - 2);
    Rect r{std::uniform_int_distribution<int>(1, height - 1 - h)(rng),
           std::uniform_int_distribution<int>(1, width - 1 - w)(rng), h, w};
    if (std::none_of(rects.begin(), rects.end(), [&](const Rect& o) { return conflicts(r, o); }))
      rects.push_back(r);
  }

  const double cosine = std::uniform_real_distribution<double>(0.0, max_center_cosine)(rng);
  const Eigen::MatrixXd centres = cluster_centres(rng, dim, n_objects + 1, cosine);

  PlantedScene scene{random_grid(rng, 2, 2, 1), {}, 1.0 - cosine};
  std::vector<int> owner(n, 0);
  for (int o = 0; o < n_objects; ++o) {
    BoolMap m = BoolMap::Constant(height, width, false);
    const Rect& r = rects[o];
    m.block(r.r0, r.c0, r.h, r.w) = true;
    m(r.r0, r.c0) = m(r.r0, r.c0 + r.w - 1) = false;
    m(r.r0 + r.h - 1, r.c0) = m(r.r0 + r.h - 1, r.c0 + r.w - 1) = false;
    for (int p = 0; p < n; ++p)
      if (m(p / width, p % width)) owner[p] = o + 1;
    scene.objects.push_back(std::move(m));
  }

  std::normal_distribution<double> normal;
  const double sigma = 0.2 / std::sqrt(static_cast<double>(dim));
  Eigen::MatrixXd f(n, dim);
  for (int p = 0; p < n; ++p) {
    f.row(p) = centres.col(owner[p]).transpose();
    for (int d = 0; d < dim; ++d) f(p, d) += sigma * normal(rng);
  }
  scene.grid = FeatureGrid(id, std::move(f), height, width, square_geometry(height, width));
  return scene;
}

AffinityGraph random_affinity_graph(std::mt19937_64& rng, int height, int width) {
  const int n = height * width;
  AffinityParams params;
  params.k = std::min(10, n - 1);
  const int kind = std::uniform_int_distribution<int>(0, 2)(rng);
  if (kind == 0 && height >= 6 && width >= 6) {
    // each object needs a 4 x 4 block plus a one-patch gap
    const int fit = ((height - 1) / 5) * ((width - 1) / 5);
    const int objects = std::uniform_int_distribution<int>(1, std::min(3, fit))(rng);
    return build_affinity(normalize(planted_scene(rng, height, width, 16, objects, 0.3).grid), params);
  }
  if (kind == 1) {
    // smooth random field: nearby patches are similar, distant ones are not
    const int dim = 16;
    std::uniform_real_distribution<double> freq(-1.2, 1.2), phase(0.0, 6.283185307179586);
    Eigen::MatrixXd f(n, dim);
    for (int d = 0; d < dim; ++d) {
      const double a = freq(rng), b = freq(rng), ph = phase(rng);
      for (int p = 0; p < n; ++p) f(p, d) = std::cos(a * (p / width) + b * (p % width) + ph);
    }
    return build_affinity(normalize(FeatureGrid("smooth", std::move(f), height, width,
                                                square_geometry(height, width))),
                          params);
  }
  const int dim = std::uniform_int_distribution<int>(8, 32)(rng);
  return build_affinity(normalize(random_grid(rng, height, width, dim)), params);
}

BoolMap random_mask(std::mt19937_64& rng, int rows, int cols, double p) {
  std::bernoulli_distribution coin(p);
  BoolMap m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = coin(rng);
  return m;
}

RealMap random_map(std::mt19937_64& rng, int rows, int cols) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  RealMap m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
  return m;
}

}  // namespace cutonce::testing
