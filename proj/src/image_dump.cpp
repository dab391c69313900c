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

#include "cutonce/image_dump.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "cutonce/errors.hpp"

namespace cutonce {

namespace {

void write_bytes(const std::filesystem::path& path, Eigen::Index rows, Eigen::Index cols,
                 const std::vector<std::uint8_t>& pixels) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError(path.string() + ": cannot open for writing");
  out << "P5\n" << cols << ' ' << rows << "\n255\n";
  out.write(reinterpret_cast<const char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
  if (!out) throw FormatError(path.string() + ": write failed");
}

template <typename Source>
void write_scaled(const std::filesystem::path& path, const Source& m) {
  const double lo = m.minCoeff();
  const double hi = m.maxCoeff();
  std::vector<std::uint8_t> pixels;
  pixels.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const double t = hi > lo ? (m(r, c) - lo) / (hi - lo) : 0.5;
      pixels.push_back(static_cast<std::uint8_t>(std::clamp(t * 255.0 + 0.5, 0.0, 255.0)));
    }
  }
  write_bytes(path, m.rows(), m.cols(), pixels);
}

}  // namespace

void write_pgm(const std::filesystem::path& path, const RealMap& map) { write_scaled(path, map); }

void write_pgm(const std::filesystem::path& path, const Eigen::MatrixXd& matrix) { write_scaled(path, matrix); }

void write_pgm(const std::filesystem::path& path, const BoolMap& mask) {
  std::vector<std::uint8_t> pixels;
  pixels.reserve(static_cast<std::size_t>(mask.size()));
  for (Eigen::Index r = 0; r < mask.rows(); ++r) {
    for (Eigen::Index c = 0; c < mask.cols(); ++c) pixels.push_back(mask(r, c) ? 255 : 0);
  }
  write_bytes(path, mask.rows(), mask.cols(), pixels);
}

void write_pgm(const std::filesystem::path& path, const LabelMap& labels) {
  const int count = labels.size() > 0 ? labels.maxCoeff() : 0;
  std::vector<std::uint8_t> pixels;
  pixels.reserve(static_cast<std::size_t>(labels.size()));
  for (Eigen::Index r = 0; r < labels.rows(); ++r) {
    for (Eigen::Index c = 0; c < labels.cols(); ++c) {
      const int label = labels(r, c);
      pixels.push_back(label == 0 ? 0 : static_cast<std::uint8_t>(55 + (200 * label) / std::max(1, count)));
    }
  }
  write_bytes(path, labels.rows(), labels.cols(), pixels);
}

}  // namespace cutonce
