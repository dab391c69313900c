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

#include "cutonce/feature_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "cutonce/errors.hpp"
#include "cutonce/npy.hpp"

namespace cutonce {

namespace {

void check_features(const Eigen::MatrixXd& features, const std::string& image_id) {
  for (Eigen::Index p = 0; p < features.rows(); ++p) {
    for (Eigen::Index d = 0; d < features.cols(); ++d) {
      if (!std::isfinite(features(p, d))) {
        throw DataError(image_id + ": non-finite feature at patch " + std::to_string(p) +
                        ", channel " + std::to_string(d));
      }
    }
    if (features.row(p).norm() < kMinFeatureNorm) {
      throw DataError(image_id + ": zero-norm feature vector at patch " + std::to_string(p));
    }
  }
}

int positive_int(const nlohmann::json& meta, const char* key, const std::filesystem::path& path) {
  if (!meta.contains(key)) throw FormatError(path.string() + ": sidecar missing '" + key + "'");
  const auto& v = meta.at(key);
  if (!v.is_number_integer() || v.get<long long>() <= 0) {
    throw FormatError(path.string() + ": sidecar '" + key + "' must be a positive integer");
  }
  return v.get<int>();
}

}  // namespace

FeatureGrid::FeatureGrid(std::string image_id, Eigen::MatrixXd features, int height, int width,
                         GridGeometry geometry, std::string model, bool normalized)
    : image_id_(std::move(image_id)),
      model_(std::move(model)),
      features_(std::move(features)),
      height_(height),
      width_(width),
      geometry_(geometry),
      normalized_(normalized) {
  if (features_.cols() < 1) throw ValidationError(image_id_ + ": feature dimension must be >= 1");
  if (height_ < 2 || width_ < 2) {
    throw ValidationError(image_id_ + ": grid must be at least 2x2, got " + std::to_string(height_) +
                          "x" + std::to_string(width_));
  }
  if (features_.rows() != static_cast<Eigen::Index>(height_) * width_) {
    throw ValidationError(image_id_ + ": feature rows do not equal H*W");
  }
  const auto& g = geometry_;
  if (g.patch_size <= 0 || g.orig_width <= 0 || g.orig_height <= 0) {
    throw ValidationError(image_id_ + ": geometry entries must be positive");
  }
  if (g.resized_width != width_ * g.patch_size || g.resized_height != height_ * g.patch_size) {
    std::ostringstream msg;
    msg << image_id_ << ": tensor grid " << height_ << "x" << width_ << " with patch_size "
        << g.patch_size << " does not match resized " << g.resized_height << "x" << g.resized_width;
    throw ValidationError(msg.str());
  }
}

std::filesystem::path sidecar_path(const std::filesystem::path& npy_path) {
  auto p = npy_path;
  p.replace_extension(".json");
  return p;
}

FeatureGrid load_feature_grid(const std::filesystem::path& npy_path) {
  const auto array = npy::read(npy_path);
  if (array.shape.size() != 3) {
    throw FormatError(npy_path.string() + ": expected a 3-d (D, H, W) tensor");
  }

  const auto meta_path = sidecar_path(npy_path);
  std::ifstream meta_in(meta_path);
  if (!meta_in) throw FormatError(meta_path.string() + ": cannot open sidecar");
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(meta_in);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(meta_path.string() + ": " + e.what());
  }
  if (!meta.is_object()) throw FormatError(meta_path.string() + ": sidecar must be a JSON object");

  GridGeometry geometry;
  geometry.patch_size = positive_int(meta, "patch_size", meta_path);
  geometry.orig_width = positive_int(meta, "orig_width", meta_path);
  geometry.orig_height = positive_int(meta, "orig_height", meta_path);
  geometry.resized_width = positive_int(meta, "resized_width", meta_path);
  geometry.resized_height = positive_int(meta, "resized_height", meta_path);

  std::string image_id = npy_path.stem().string();
  if (meta.contains("image_id")) {
    const auto& id = meta.at("image_id");
    if (id.is_string()) {
      image_id = id.get<std::string>();
    } else if (id.is_number_integer()) {
      image_id = std::to_string(id.get<long long>());
    } else {
      throw FormatError(meta_path.string() + ": 'image_id' must be a string or integer");
    }
  }
  std::string model;
  if (meta.contains("model") && meta.at("model").is_string()) model = meta.at("model").get<std::string>();

  const auto dim = static_cast<Eigen::Index>(array.shape[0]);
  const auto height = static_cast<Eigen::Index>(array.shape[1]);
  const auto width = static_cast<Eigen::Index>(array.shape[2]);
  if (dim < 1 || height < 1 || width < 1) throw ValidationError(npy_path.string() + ": empty tensor");
  const auto nodes = height * width;

  // (D, H, W) C-order: element (d, p) lives at d * N + p.
  Eigen::MatrixXd features(nodes, dim);
  for (Eigen::Index d = 0; d < dim; ++d) {
    for (Eigen::Index p = 0; p < nodes; ++p) {
      features(p, d) = static_cast<double>(array.data[static_cast<std::size_t>(d * nodes + p)]);
    }
  }

  FeatureGrid grid(image_id, std::move(features), static_cast<int>(height), static_cast<int>(width),
                   geometry, model, false);
  check_features(grid.features(), image_id);
  return grid;
}

FeatureGrid normalize(const FeatureGrid& grid) {
  Eigen::MatrixXd out = grid.features();
  for (Eigen::Index p = 0; p < out.rows(); ++p) {
    const double n = out.row(p).norm();
    if (!(n >= kMinFeatureNorm)) {
      throw DataError(grid.image_id() + ": near-zero feature vector at patch " + std::to_string(p));
    }
    out.row(p) /= n;
  }
  return FeatureGrid(grid.image_id(), std::move(out), grid.height(), grid.width(), grid.geometry(),
                     grid.model(), true);
}

void save_feature_grid(const FeatureGrid& grid, const std::filesystem::path& npy_path) {
  npy::Float32Array array;
  const auto nodes = static_cast<std::size_t>(grid.num_nodes());
  const auto dim = static_cast<std::size_t>(grid.dim());
  array.shape = {dim, static_cast<std::size_t>(grid.height()), static_cast<std::size_t>(grid.width())};
  array.data.resize(dim * nodes);
  for (std::size_t d = 0; d < dim; ++d) {
    for (std::size_t p = 0; p < nodes; ++p) {
      array.data[d * nodes + p] = static_cast<float>(
          grid.features()(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(d)));
    }
  }
  npy::write(npy_path, array);

  const auto& g = grid.geometry();
  nlohmann::ordered_json meta;
  meta["image_id"] = grid.image_id();
  meta["orig_width"] = g.orig_width;
  meta["orig_height"] = g.orig_height;
  meta["resized_width"] = g.resized_width;
  meta["resized_height"] = g.resized_height;
  meta["patch_size"] = g.patch_size;
  meta["model"] = grid.model();
  std::ofstream out(sidecar_path(npy_path), std::ios::trunc);
  if (!out) throw FormatError(sidecar_path(npy_path).string() + ": cannot open for writing");
  out << meta.dump(2) << '\n';
}

}  // namespace cutonce
