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

#include "lanczos.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include <Eigen/Eigenvalues>

#include "cutonce/errors.hpp"

namespace cutonce::detail {

namespace {

// splitmix64: fixed start vectors independent of the standard library's distributions.
double hashed_unit(std::uint64_t i, std::uint64_t salt) {
  std::uint64_t z = i * 0x9E3779B97F4A7C15ULL + salt;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return static_cast<double>(z >> 11) * 0x1.0p-53 * 2.0 - 1.0;
}

Eigen::VectorXd start_vector(Eigen::Index n, std::uint64_t salt) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = hashed_unit(static_cast<std::uint64_t>(i), salt);
  return v;
}

// Classical Gram-Schmidt applied twice against `deflate` and the first `cols` basis columns.
double orthogonalize(Eigen::VectorXd& v, const Eigen::VectorXd& deflate, const Eigen::MatrixXd& basis,
                     Eigen::Index cols) {
  for (int pass = 0; pass < 2; ++pass) {
    v -= deflate * deflate.dot(v);
    if (cols > 0) {
      const Eigen::VectorXd coeff = basis.leftCols(cols).transpose() * v;
      v.noalias() -= basis.leftCols(cols) * coeff;
    }
  }
  return v.norm();
}

}  // namespace

KrylovResult extreme_eigenpair(const LinearOperator& apply, const Eigen::VectorXd& deflate,
                               const KrylovOptions& options, const AcceptTest& accept) {
  const Eigen::Index n = deflate.size();
  if (n < 2) throw ContractError("extreme_eigenpair: need at least two nodes");
  const Eigen::Index space = n - 1;  // dimension of the deflated subspace
  const Eigen::Index max_basis = std::clamp<Eigen::Index>(options.max_basis, 1, space);
  const Eigen::Index keep = std::clamp<Eigen::Index>(options.keep, 1, std::max<Eigen::Index>(1, max_basis - 1));
  const bool want_smallest = options.target == Target::smallest;

  Eigen::MatrixXd basis(n, max_basis);
  Eigen::MatrixXd image(n, max_basis);  // apply(basis)
  Eigen::MatrixXd projected = Eigen::MatrixXd::Zero(max_basis, max_basis);

  KrylovResult result;
  std::uint64_t salt = 0x5DEECE66DULL;
  Eigen::VectorXd next = start_vector(n, salt);
  double norm = orthogonalize(next, deflate, basis, 0);
  if (norm == 0.0) throw ContractError("extreme_eigenpair: start vector lies in the deflated space");
  basis.col(0) = next / norm;

  Eigen::Index j = 0;
  Eigen::VectorXd w(n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ritz;
  while (true) {
    apply(basis.col(j), w);
    ++result.steps;
    // Exact operators leave the deflated direction invariant; rounding does not.
    w -= deflate * deflate.dot(w);
    image.col(j) = w;
    const Eigen::VectorXd column = basis.leftCols(j + 1).transpose() * w;
    projected.col(j).head(j + 1) = column;
    projected.row(j).head(j + 1) = column.transpose();
    ++j;

    const Eigen::MatrixXd h = 0.5 * (projected.topLeftCorner(j, j) +
                                     projected.topLeftCorner(j, j).transpose());
    ritz.compute(h);
    const Eigen::Index pick = want_smallest ? 0 : j - 1;
    const double theta = ritz.eigenvalues()(pick);
    const Eigen::VectorXd coeffs = ritz.eigenvectors().col(pick);
    Eigen::VectorXd y = basis.leftCols(j) * coeffs;
    const double y_norm = y.norm();
    y /= y_norm;
    const Eigen::VectorXd r = (image.leftCols(j) * coeffs) / y_norm - theta * y;
    const double r_norm = r.norm();

    result.vector = y;
    result.value = theta;
    result.residual = r_norm;
    if (r_norm <= options.tolerance * std::max(1.0, std::abs(theta)) && (!accept || accept(y, theta))) {
      result.converged = true;
      return result;
    }
    if (result.steps >= options.max_steps) return result;

    if (j == max_basis) {
      // Thick restart: compress onto the Ritz vectors nearest the target end of the spectrum.
      const Eigen::Index kept = std::min(keep, j);
      Eigen::MatrixXd selector(j, kept);
      Eigen::VectorXd values(kept);
      for (Eigen::Index c = 0; c < kept; ++c) {
        const Eigen::Index src = want_smallest ? c : j - 1 - c;
        selector.col(c) = ritz.eigenvectors().col(src);
        values(c) = ritz.eigenvalues()(src);
      }
      const Eigen::MatrixXd new_basis = basis.leftCols(j) * selector;
      const Eigen::MatrixXd new_image = image.leftCols(j) * selector;
      basis.leftCols(kept) = new_basis;
      image.leftCols(kept) = new_image;
      projected.setZero();
      projected.topLeftCorner(kept, kept) = values.asDiagonal();
      j = kept;
      // All Ritz residuals of a Lanczos basis are parallel; continue the Krylov sequence from it.
      next = r;
    } else {
      next = w;
    }

    norm = orthogonalize(next, deflate, basis, j);
    if (j >= space) {
      // The basis spans the whole deflated space; only a restart with fewer vectors can continue.
      norm = 0.0;
    }
    if (!(norm > 1e-10 * std::max(1.0, w.norm()))) {
      // Invariant subspace reached: start a fresh Krylov sequence orthogonal to it.
      if (j >= space) return result;
      for (int attempt = 0; attempt < 8 && !(norm > 1e-8); ++attempt) {
        next = start_vector(n, ++salt);
        norm = orthogonalize(next, deflate, basis, j);
      }
      if (!(norm > 1e-8)) return result;
    }
    basis.col(j) = next / norm;
  }
}

}  // namespace cutonce::detail
