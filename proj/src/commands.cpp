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

#include "cutonce/commands.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <thread>

#include <spdlog/spdlog.h>

#include "cutonce/errors.hpp"
#include "cutonce/image_dump.hpp"

namespace cutonce {

namespace {

namespace fs = std::filesystem;

struct Outcome {
  fs::path file;
  std::optional<ProcessedImage> image;
  std::string error;
  double load_seconds = 0.0;
};

std::vector<fs::path> feature_files(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw ValidationError(dir.string() + ": not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".npy") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

std::optional<std::int64_t> numeric_id(const std::string& text) {
  if (text.empty() || text.size() > 18 || text.find_first_not_of("0123456789") != std::string::npos) {
    return std::nullopt;
  }
  return std::stoll(text);
}

}  // namespace

void configure_logging() {
  const char* level = std::getenv("CUTONCE_LOG");
  const std::string value = level != nullptr ? level : "info";
  if (value == "error") {
    spdlog::set_level(spdlog::level::err);
  } else if (value == "debug") {
    spdlog::set_level(spdlog::level::debug);
  } else {
    if (value != "info") spdlog::warn("CUTONCE_LOG='{}' not recognised, using info", value);
    spdlog::set_level(spdlog::level::info);
  }
}

AnnotationSet build_annotation_set(const std::vector<ProcessedImage>& images, const PipelineConfig& config) {
  std::vector<std::int64_t> ids;
  std::set<std::int64_t> seen;
  for (const auto& image : images) {
    const auto id = numeric_id(image.image_id);
    if (!id || !seen.insert(*id).second) {
      ids.clear();
      break;
    }
    ids.push_back(*id);
  }
  if (ids.size() != images.size()) {
    ids.resize(images.size());
    for (std::size_t i = 0; i < images.size(); ++i) ids[i] = static_cast<std::int64_t>(i + 1);
  }

  AnnotationSet set;
  set.info["description"] = "cutonce class-agnostic pseudo masks";
  set.info["config"] = config.to_json();
  std::int64_t next_id = 1;
  for (std::size_t i = 0; i < images.size(); ++i) {
    const auto& image = images[i];
    set.images.push_back({ids[i], image.image_id, image.geometry.orig_width, image.geometry.orig_height});
    for (const auto& mask : image.result.masks) {
      set.annotations.push_back(make_record(next_id++, ids[i], mask.pixel_mask, mask.score));
    }
  }
  return set;
}

int cmd_generate(const GenerateRequest& request) {
  request.config.validate();
  const auto files = feature_files(request.features_dir);
  if (files.empty()) {
    spdlog::error("no .npy feature files in {}", request.features_dir.string());
    return 1;
  }

  std::vector<Outcome> outcomes(files.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < files.size(); i = next++) {
      auto& outcome = outcomes[i];
      outcome.file = files[i];
      try {
        const auto start = std::chrono::steady_clock::now();
        const FeatureGrid grid = normalize(load_feature_grid(files[i]));
        outcome.load_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        ProcessedImage image{grid.image_id(), grid.geometry(), run_pipeline(grid, request.config)};
        spdlog::debug("{}: {} masks in {:.3f} s", grid.image_id(), image.result.masks.size(),
                      image.result.timings.total());
        outcome.image = std::move(image);
      } catch (const std::exception& e) {
        outcome.error = e.what();
        spdlog::error("{}: {}", files[i].string(), e.what());
      }
    }
  };
  {
    const auto n_workers = std::min<std::size_t>(static_cast<std::size_t>(request.config.workers), files.size());
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < n_workers; ++w) pool.emplace_back(worker);
    worker();
  }

  std::vector<ProcessedImage> processed;
  std::vector<const Outcome*> failed;
  for (auto& outcome : outcomes) {
    if (outcome.image) {
      processed.push_back(*outcome.image);
    } else {
      failed.push_back(&outcome);
    }
  }

  auto timing_path = request.out;
  timing_path += ".timing.tsv";
  std::ofstream timing(timing_path, std::ios::trunc);
  timing << "file\timage_id\tload_s\taffinity_s\tspectral_s\tsaliency_s\tinstances_s\ttotal_s\tmasks\tstatus\n";
  for (const auto& outcome : outcomes) {
    timing << outcome.file.filename().string() << '\t';
    if (outcome.image) {
      const auto& t = outcome.image->result.timings;
      timing << outcome.image->image_id << '\t' << outcome.load_seconds << '\t' << t.affinity << '\t' << t.spectral
             << '\t' << t.saliency << '\t' << t.instances << '\t' << t.total() << '\t'
             << outcome.image->result.masks.size() << "\tok\n";
    } else {
      timing << "-\t-\t-\t-\t-\t-\t-\t0\terror\n";
    }
  }

  if (!failed.empty()) {
    std::cerr << failed.size() << " of " << outcomes.size() << " feature files failed:\n";
    for (const auto* outcome : failed) std::cerr << "  " << outcome->file.string() << ": " << outcome->error << '\n';
  }
  if (processed.empty()) {
    spdlog::error("no valid images processed");
    return 1;
  }

  export_annotations(build_annotation_set(processed, request.config), request.out);
  std::size_t n_masks = 0;
  for (const auto& image : processed) n_masks += image.result.masks.size();
  spdlog::info("wrote {} masks for {} images to {}", n_masks, processed.size(), request.out.string());
  return 0;
}

int cmd_eval(const EvalRequest& request) {
  const AnnotationSet predictions = import_annotations(request.predictions);
  const AnnotationSet ground_truth = import_annotations(request.ground_truth);
  EvalOptions options;
  options.iou_thresholds = request.thresholds;
  const Metrics segm = evaluate(predictions, ground_truth, options, IouType::segm);
  const Metrics bbox = evaluate(predictions, ground_truth, options, IouType::bbox);

  nlohmann::ordered_json out;
  out["ap50"] = segm.ap50;
  out["ap"] = segm.ap;
  out["ar100"] = segm.ar100;
  out["segm"] = metrics_json(segm);
  out["bbox"] = metrics_json(bbox);
  std::ofstream file(request.out, std::ios::binary | std::ios::trunc);
  if (!file) throw FormatError(request.out.string() + ": cannot open for writing");
  file << out.dump(2) << '\n';
  std::cout << metrics_table(segm, bbox);
  return 0;
}

int cmd_inspect(const InspectRequest& request) {
  request.config.validate();
  const FeatureGrid grid = normalize(load_feature_grid(request.feature_file));
  fs::create_directories(request.out_dir);
  const auto out = [&](const std::string& name) { return request.out_dir / name; };

  {
    const Eigen::MatrixXd s = cosine_matrix(grid);
    const int h = grid.height();
    const int w = grid.width();
    const int rows = std::max(1, request.similarity_rows);
    for (int i = 0; i < rows; ++i) {
      // Sample patches along the main diagonal of the grid.
      const int r = (2 * i + 1) * h / (2 * rows);
      const int c = (2 * i + 1) * w / (2 * rows);
      const Eigen::Index p = static_cast<Eigen::Index>(r) * w + c;
      write_pgm(out("similarity_row_" + std::to_string(p) + ".pgm"),
                to_map(s.row(p).transpose(), h, w));
    }
    const DensityVector density = local_density(s, request.config.affinity.k);
    write_pgm(out("density.pgm"), to_map(density.rho, h, w));
    const AffinityGraph graph = contrast_threshold(
        density_tuned_weights(s, density, request.config.affinity.t0, request.config.affinity.alpha),
        request.config.affinity.tau_ncut);
    write_pgm(out("weights.pgm"), graph.weights);
  }

  Intermediates steps;
  const ImageResult result = run_pipeline(grid, request.config, &steps);
  write_pgm(out("fiedler.pgm"), steps.field.raw);
  write_pgm(out("boundary.pgm"), steps.field.boundary);
  write_pgm(out("augmented.pgm"), steps.field.augmented);
  write_pgm(out("foreground.pgm"), steps.split.foreground);
  write_pgm(out("components.pgm"), steps.components.labels);
  for (const auto& mask : result.masks) {
    write_pgm(out("mask_" + std::to_string(mask.rank) + ".pgm"), mask.pixel_mask);
  }

  nlohmann::ordered_json summary;
  summary["image_id"] = grid.image_id();
  summary["config"] = request.config.to_json();
  summary["lambda1"] = steps.eigen.lambda1;
  summary["residual"] = steps.eigen.residual;
  summary["solver_iterations"] = steps.eigen.iterations;
  summary["flipped"] = steps.split.flipped;
  summary["flip_reason"] = std::string(to_string(steps.split.flip_reason));
  summary["threshold"] = steps.split.threshold;
  summary["component_sums"] = steps.components.sums;
  summary["component_order"] = steps.components.order;
  summary["selected"] = steps.selected;
  summary["masks"] = nlohmann::ordered_json::array();
  for (const auto& mask : result.masks) {
    summary["masks"].push_back({{"rank", mask.rank},
                                {"score", mask.score},
                                {"saliency_sum", mask.saliency_sum},
                                {"bbox", {mask.bbox.x, mask.bbox.y, mask.bbox.width, mask.bbox.height}}});
  }
  std::ofstream file(out("summary.json"), std::ios::trunc);
  file << summary.dump(2) << '\n';
  spdlog::info("wrote intermediate maps for {} to {}", grid.image_id(), request.out_dir.string());
  return 0;
}

}  // namespace cutonce
