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

#include <stdexcept>
#include <string>

namespace cutonce {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed container, header or JSON document.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Well-formed input whose contents disagree with each other (shape vs metadata, unknown ids).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Numerically unusable data: non-finite values, zero-norm feature vectors.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Hyperparameter or argument outside its domain.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Caller broke a documented precondition (e.g. passing an unnormalized grid).
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Iterative eigensolver hit its iteration cap.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace cutonce
