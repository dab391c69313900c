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

#include <filesystem>

#include <Eigen/Core>

#include "cutonce/types.hpp"

namespace cutonce {

/// Binary PGM (P5), values min-max scaled to 0..255. A constant map is written as mid-gray.
void write_pgm(const std::filesystem::path& path, const RealMap& map);
void write_pgm(const std::filesystem::path& path, const Eigen::MatrixXd& matrix);
/// Foreground white, background black.
void write_pgm(const std::filesystem::path& path, const BoolMap& mask);
/// Background black; component labels spread over distinct gray levels.
void write_pgm(const std::filesystem::path& path, const LabelMap& labels);

}  // namespace cutonce
