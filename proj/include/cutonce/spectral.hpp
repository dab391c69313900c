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

#include <Eigen/Core>

#include "cutonce/affinity.hpp"

namespace cutonce {

enum class SolverKind { dense, iterative };

std::string_view to_string(SolverKind kind);
/// Accepts "dense" or "iterative"; throws ParameterError otherwise.
SolverKind parse_solver_kind(std::string_view text);

/// Second-smallest eigenpair of (D - W) x = lambda D x.
struct EigenResult {
  Eigen::VectorXd fiedler;  // unit D-norm, largest-magnitude entry positive
  double lambda1 = 0.0;
  double residual = 0.0;    // ||(D - W) x - lambda D x|| / ||x||
  SolverKind solver = SolverKind::dense;
  long iterations = 0;      // operator applications; 0 for a full decomposition
};

struct SolverOptions {
  /// Shift added to L_sym before the dense Cholesky factorization.
  double shift = 1e-6;
  /// Convergence bound on the L_sym residual for the iterative backend.
  double iterative_tolerance = 1e-8;
  /// Iteration cap for the iterative backend; <= 0 selects 10 * sqrt(N) * ln(N).
  long max_iterations = 0;
};

inline constexpr double kDenseResidualBound = 1e-6;
inline constexpr double kIterativeResidualBound = 1e-5;

/// Solves through the similarity transform L_sym = D^{-1/2} (D - W) D^{-1/2}, with the trivial
/// eigenvector D^{1/2} 1 deflated, and maps back with x = D^{-1/2} u.
///
/// The dense backend factors L_sym + shift * I and runs shift-invert Lanczos on the factor; if
/// that fails to converge it falls back to a full symmetric eigendecomposition. The iterative
/// backend runs thick-restart Lanczos directly on L_sym and throws ConvergenceError at its cap.
/// Throws ContractError if any degree is not strictly positive.
EigenResult solve_fiedler(const AffinityGraph& graph, SolverKind solver,
                          const SolverOptions& options = {});

/// ||(D - W) x - lambda D x||_2 / ||x||_2.
double generalized_residual(const AffinityGraph& graph, const Eigen::VectorXd& x, double lambda);

/// Flips `x` so that its largest-magnitude entry (lowest index on ties) is positive.
void canonicalize_sign(Eigen::VectorXd& x);

}  // namespace cutonce
