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
#include <string>

#include <Eigen/Core>

namespace cutonce {

/// Image geometry carried alongside a feature grid, used to map patch masks back to pixels.
struct GridGeometry {
  int patch_size = 8;
  int orig_width = 480;
  int orig_height = 480;
  int resized_width = 480;
  int resized_height = 480;
};

/// Per-image patch features. Immutable after construction.
///
/// Features are held as an N x D matrix whose row p is the vector of patch
/// (p / width, p % width). Values come from float32 files but are kept in
/// double precision for all downstream linear algebra.
class FeatureGrid {
 public:
  /// Validates shape and geometry; throws ValidationError or DataError.
  FeatureGrid(std::string image_id, Eigen::MatrixXd features, int height, int width,
              GridGeometry geometry, std::string model = {}, bool normalized = false);

  const std::string& image_id() const noexcept { return image_id_; }
  const std::string& model() const noexcept { return model_; }
  const Eigen::MatrixXd& features() const noexcept { return features_; }
  const GridGeometry& geometry() const noexcept { return geometry_; }
  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  int dim() const noexcept { return static_cast<int>(features_.cols()); }
  int num_nodes() const noexcept { return height_ * width_; }
  bool normalized() const noexcept { return normalized_; }

 private:
  std::string image_id_;
  std::string model_;
  Eigen::MatrixXd features_;
  int height_;
  int width_;
  GridGeometry geometry_;
  bool normalized_;
};

/// Patch vectors with an L2 norm below this are rejected.
inline constexpr double kMinFeatureNorm = 1e-12;

/// Loads `<stem>.npy` with shape (D, H, W) and its `<stem>.json` sidecar.
/// Throws FormatError (container/JSON), ValidationError (shape vs metadata)
/// or DataError (non-finite values, zero-norm patches).
FeatureGrid load_feature_grid(const std::filesystem::path& npy_path);

/// Divides each patch vector by its L2 norm. Throws DataError naming the first
/// patch whose norm is below kMinFeatureNorm.
FeatureGrid normalize(const FeatureGrid& grid);

/// Writes the grid as a float32 (D, H, W) NPY file plus its JSON sidecar.
void save_feature_grid(const FeatureGrid& grid, const std::filesystem::path& npy_path);

/// Sidecar path for a feature file: same stem, `.json` extension.
std::filesystem::path sidecar_path(const std::filesystem::path& npy_path);

}  // namespace cutonce
