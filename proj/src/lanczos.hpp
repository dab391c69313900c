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

#include <functional>

#include <Eigen/Core>

namespace cutonce::detail {

enum class Target { smallest, largest };

struct KrylovOptions {
  Target target = Target::smallest;
  Eigen::Index max_basis = 48;   // basis size that triggers a thick restart
  Eigen::Index keep = 12;        // Ritz vectors kept across a restart
  long max_steps = 1000;         // operator applications
  double tolerance = 1e-10;      // on ||A y - theta y||, relative to max(1, |theta|)
};

struct KrylovResult {
  Eigen::VectorXd vector;
  double value = 0.0;
  double residual = 0.0;  // ||A y - theta y|| of the returned pair
  long steps = 0;
  bool converged = false;
};

using LinearOperator = std::function<void(const Eigen::VectorXd& in, Eigen::VectorXd& out)>;
/// Final acceptance test, called on candidate pairs whose Krylov residual already meets the tolerance.
using AcceptTest = std::function<bool(const Eigen::VectorXd& vector, double value)>;

/// Thick-restart Lanczos with full reorthogonalization for one extreme eigenpair
/// of a symmetric operator, restricted to the orthogonal complement of `deflate`
/// (a unit vector). The start vector is deterministic.
KrylovResult extreme_eigenpair(const LinearOperator& apply, const Eigen::VectorXd& deflate,
                               const KrylovOptions& options, const AcceptTest& accept = {});

}  // namespace cutonce::detail
