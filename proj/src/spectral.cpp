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

#include "cutonce/spectral.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "cutonce/errors.hpp"
#include "lanczos.hpp"

namespace cutonce {

namespace {

struct RayleighPair {
  double lambda;
  double residual;
};

// Rayleigh quotient of the generalized problem and the matching residual, from one product W x.
RayleighPair rayleigh(const AffinityGraph& graph, const Eigen::VectorXd& x) {
  const Eigen::VectorXd dx = graph.degrees.cwiseProduct(x);
  const Eigen::VectorXd lx = dx - graph.weights * x;
  const double lambda = x.dot(lx) / x.dot(dx);
  return {lambda, (lx - lambda * dx).norm() / x.norm()};
}

long default_iteration_cap(Eigen::Index n) {
  const double nn = static_cast<double>(n);
  return std::max(1L, static_cast<long>(std::ceil(10.0 * std::sqrt(nn) * std::log(nn))));
}

EigenResult finalize(const AffinityGraph& graph, const Eigen::VectorXd& inv_sqrt_degree,
                     const Eigen::VectorXd& u, SolverKind solver, long iterations) {
  EigenResult out;
  out.fiedler = inv_sqrt_degree.cwiseProduct(u);
  out.fiedler /= std::sqrt(out.fiedler.dot(graph.degrees.cwiseProduct(out.fiedler)));
  canonicalize_sign(out.fiedler);
  const double lambda = std::clamp(rayleigh(graph, out.fiedler).lambda, 0.0, 2.0);
  out.lambda1 = lambda;
  out.residual = generalized_residual(graph, out.fiedler, lambda);
  out.solver = solver;
  out.iterations = iterations;
  return out;
}

Eigen::MatrixXd normalized_laplacian(const AffinityGraph& graph, const Eigen::VectorXd& inv_sqrt_degree,
                                     double shift) {
  const Eigen::Index n = graph.n_nodes();
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      m(i, j) = -(inv_sqrt_degree(i) * graph.weights(i, j) * inv_sqrt_degree(j));
    }
  }
  m.diagonal().array() += 1.0 + shift;
  return m;
}

Eigen::VectorXd full_decomposition(const AffinityGraph& graph, const Eigen::VectorXd& inv_sqrt_degree,
                                   const Eigen::VectorXd& trivial) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      normalized_laplacian(graph, inv_sqrt_degree, 0.0));
  if (es.info() != Eigen::Success) {
    throw ConvergenceError("solve_fiedler: dense eigendecomposition failed", INFINITY);
  }
  Eigen::VectorXd u = es.eigenvectors().col(1);
  u -= trivial * trivial.dot(u);
  return u.normalized();
}

}  // namespace

std::string_view to_string(SolverKind kind) {
  return kind == SolverKind::dense ? "dense" : "iterative";
}

SolverKind parse_solver_kind(std::string_view text) {
  if (text == "dense") return SolverKind::dense;
  if (text == "iterative") return SolverKind::iterative;
  throw ParameterError("unknown solver '" + std::string(text) + "' (expected dense or iterative)");
}

double generalized_residual(const AffinityGraph& graph, const Eigen::VectorXd& x, double lambda) {
  const Eigen::VectorXd dx = graph.degrees.cwiseProduct(x);
  return (dx - graph.weights * x - lambda * dx).norm() / x.norm();
}

void canonicalize_sign(Eigen::VectorXd& x) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < x.size(); ++i) {
    if (std::abs(x(i)) > std::abs(x(best))) best = i;
  }
  if (x.size() > 0 && x(best) < 0.0) x = -x;
}

EigenResult solve_fiedler(const AffinityGraph& graph, SolverKind solver, const SolverOptions& options) {
  const Eigen::Index n = graph.n_nodes();
  if (n < 2 || graph.weights.cols() != n || graph.degrees.size() != n) {
    throw ContractError("solve_fiedler: graph must be square with one degree per node");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(graph.degrees(i) > 0.0)) {
      throw ContractError("solve_fiedler: non-positive degree at node " + std::to_string(i));
    }
  }

  const Eigen::VectorXd sqrt_degree = graph.degrees.cwiseSqrt();
  const Eigen::VectorXd inv_sqrt_degree = sqrt_degree.cwiseInverse();
  const Eigen::VectorXd trivial = sqrt_degree.normalized();  // null vector of L_sym

  const long cap = options.max_iterations > 0 ? options.max_iterations : default_iteration_cap(n);
  const double bound = solver == SolverKind::dense ? kDenseResidualBound : kIterativeResidualBound;
  const auto accept = [&](const Eigen::VectorXd& u, double) {
    return rayleigh(graph, inv_sqrt_degree.cwiseProduct(u)).residual <= bound;
  };

  if (solver == SolverKind::iterative) {
    const auto apply = [&](const Eigen::VectorXd& in, Eigen::VectorXd& out) {
      const Eigen::VectorXd scaled = inv_sqrt_degree.cwiseProduct(in);
      out.noalias() = graph.weights * scaled;
      out = in - inv_sqrt_degree.cwiseProduct(out);
    };
    detail::KrylovOptions krylov;
    krylov.target = detail::Target::smallest;
    krylov.max_steps = cap;
    krylov.tolerance = options.iterative_tolerance;
    const auto found = detail::extreme_eigenpair(apply, trivial, krylov, accept);
    if (!found.converged) {
      throw ConvergenceError("solve_fiedler: iterative solver did not converge within " +
                                 std::to_string(cap) + " iterations",
                             found.residual);
    }
    return finalize(graph, inv_sqrt_degree, found.vector, solver, found.steps);
  }

  if (!(options.shift > 0.0)) throw ParameterError("solve_fiedler: shift must be positive");
  Eigen::MatrixXd shifted = normalized_laplacian(graph, inv_sqrt_degree, options.shift);
  const Eigen::LLT<Eigen::Ref<Eigen::MatrixXd>> factor(shifted);
  if (factor.info() == Eigen::Success) {
    const auto apply = [&](const Eigen::VectorXd& in, Eigen::VectorXd& out) {
      out = in;
      factor.matrixL().solveInPlace(out);
      factor.matrixU().solveInPlace(out);
    };
    detail::KrylovOptions krylov;
    krylov.target = detail::Target::largest;
    krylov.max_steps = std::max(300L, cap);
    krylov.tolerance = 1e-11;
    const auto found = detail::extreme_eigenpair(apply, trivial, krylov, accept);
    if (found.converged) return finalize(graph, inv_sqrt_degree, found.vector, solver, found.steps);
  }
  return finalize(graph, inv_sqrt_degree, full_decomposition(graph, inv_sqrt_degree, trivial), solver, 0);
}

}  // namespace cutonce
