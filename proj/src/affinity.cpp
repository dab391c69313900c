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

#include "cutonce/affinity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include "cutonce/errors.hpp"

namespace cutonce {

Eigen::MatrixXd cosine_matrix(const FeatureGrid& grid) {
  if (!grid.normalized()) {
    throw ContractError(grid.image_id() + ": cosine_matrix requires a normalized grid");
  }
  const auto& k = grid.features();
  const Eigen::Index n = k.rows();
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
  // Only the lower triangle is computed; mirroring it makes S exactly symmetric.
  s.selfadjointView<Eigen::Lower>().rankUpdate(k);
  s.triangularView<Eigen::StrictlyUpper>() = s.transpose();
  return s;
}

DensityVector local_density(const Eigen::MatrixXd& s, int k) {
  const Eigen::Index n = s.rows();
  if (s.cols() != n) throw ContractError("local_density: similarity matrix must be square");
  if (k < 1 || k > n - 1) {
    throw ParameterError("local_density: k must lie in [1, N-1], got k=" + std::to_string(k) +
                         " for N=" + std::to_string(n));
  }

  DensityVector out{Eigen::VectorXd(n)};
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n - 1));
  for (Eigen::Index i = 0; i < n; ++i) {
    std::iota(idx.begin(), idx.begin() + i, Eigen::Index{0});
    std::iota(idx.begin() + i, idx.end(), i + 1);
    const auto more_similar = [&](Eigen::Index a, Eigen::Index b) {
      const double sa = s(i, a);
      const double sb = s(i, b);
      return sa > sb || (sa == sb && a < b);
    };
    std::partial_sort(idx.begin(), idx.begin() + k, idx.end(), more_similar);
    double sum = 0.0;
    for (int j = 0; j < k; ++j) sum += s(i, idx[static_cast<std::size_t>(j)]);
    out.rho(i) = sum / static_cast<double>(k);
  }
  return out;
}

Eigen::MatrixXd density_tuned_weights(Eigen::MatrixXd s, const DensityVector& density, double t0,
                                      double alpha) {
  const Eigen::Index n = s.rows();
  if (s.cols() != n || density.rho.size() != n) {
    throw ContractError("density_tuned_weights: shape mismatch between S and rho");
  }
  if (!std::isfinite(t0) || !std::isfinite(alpha)) {
    throw ParameterError("density_tuned_weights: t0 and alpha must be finite");
  }
  const auto& rho = density.rho;
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double temperature = t0 + alpha * ((rho(i) + rho(j)) / 2.0);
      if (!(temperature > 0.0)) {
        std::ostringstream msg;
        msg << "density_tuned_weights: non-positive temperature " << temperature << " for pair ("
            << std::min(i, j) << ", " << std::max(i, j) << ")";
        throw ParameterError(msg.str());
      }
      s(i, j) /= temperature;
    }
  }
  return s;
}

AffinityGraph contrast_threshold(Eigen::MatrixXd w, double tau_ncut) {
  if (!std::isfinite(tau_ncut)) throw ParameterError("contrast_threshold: tau_ncut must be finite");
  const Eigen::Index n = w.rows();
  if (w.cols() != n) throw ContractError("contrast_threshold: weight matrix must be square");

  w = (w.array() >= tau_ncut).select(1.0, Eigen::MatrixXd::Constant(n, n, kWeakEdge));

  AffinityGraph graph;
  graph.degrees.resize(n);
  // Column j equals row j by symmetry; summing down a column walks memory contiguously.
  for (Eigen::Index j = 0; j < n; ++j) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) sum += w(i, j);
    graph.degrees(j) = sum;
  }
  graph.weights = std::move(w);
  graph.params.tau_ncut = tau_ncut;
  return graph;
}

AffinityGraph build_affinity(const FeatureGrid& grid, const AffinityParams& params) {
  Eigen::MatrixXd s = cosine_matrix(grid);
  const DensityVector density = local_density(s, params.k);
  AffinityGraph graph = contrast_threshold(
      density_tuned_weights(std::move(s), density, params.t0, params.alpha), params.tau_ncut);
  graph.params = params;
  return graph;
}

}  // namespace cutonce
