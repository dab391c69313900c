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

#include <Eigen/Core>

#include "cutonce/feature_io.hpp"

namespace cutonce {

/// Weight given to pairs that fail the contrast threshold.
inline constexpr double kWeakEdge = 1e-5;

struct AffinityParams {
  int k = 10;               // neighbours used for the local density
  double t0 = 1.0;          // base temperature
  double alpha = 0.5;       // density modulation of the temperature
  double tau_ncut = 0.15;   // contrast threshold on the tuned weights
};

/// Per-node local density: mean cosine similarity to the k most similar other nodes.
struct DensityVector {
  Eigen::VectorXd rho;
};

/// Symmetric binarized edge weights with entries in {1, kWeakEdge} and their row sums.
struct AffinityGraph {
  Eigen::MatrixXd weights;
  Eigen::VectorXd degrees;
  AffinityParams params;

  Eigen::Index n_nodes() const noexcept { return weights.rows(); }
};

/// S = K K^T for a normalized grid. Exactly symmetric.
Eigen::MatrixXd cosine_matrix(const FeatureGrid& grid);

/// rho_i = mean of the k largest off-diagonal entries of row i of `s`.
/// Ties in the top-k selection go to the lower node index.
DensityVector local_density(const Eigen::MatrixXd& s, int k);

/// w_ij = S_ij / (t0 + alpha * (rho_i + rho_j) / 2), computed in place on `s`.
Eigen::MatrixXd density_tuned_weights(Eigen::MatrixXd s, const DensityVector& density, double t0,
                                      double alpha);

/// Sets every entry >= tau_ncut to 1 and the rest to kWeakEdge, diagonal included,
/// and computes the degrees as serial row sums.
AffinityGraph contrast_threshold(Eigen::MatrixXd w, double tau_ncut);

/// Full chain: cosine -> density -> tuned weights -> contrast threshold.
AffinityGraph build_affinity(const FeatureGrid& grid, const AffinityParams& params);

}  // namespace cutonce
