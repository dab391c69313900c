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
#include <vector>

#include "cutonce/annotations.hpp"
#include "cutonce/config.hpp"
#include "cutonce/evaluation.hpp"
#include "cutonce/feature_io.hpp"
#include "cutonce/pipeline.hpp"

namespace cutonce {

struct GenerateRequest {
  std::filesystem::path features_dir;
  std::filesystem::path out;
  PipelineConfig config;
};

struct EvalRequest {
  std::filesystem::path predictions;
  std::filesystem::path ground_truth;
  std::filesystem::path out;  // metrics JSON; the table goes to stdout
  std::vector<double> thresholds = EvalOptions::default_iou_thresholds();
};

struct InspectRequest {
  std::filesystem::path feature_file;
  std::filesystem::path out_dir;
  PipelineConfig config;
  int similarity_rows = 4;
};

/// Runs the pipeline over every `*.npy` in the directory (sorted by name) with a worker pool
/// and writes one annotation file plus `<out>.timing.tsv`. Unreadable files are logged and
/// skipped. Returns the process exit code: 0 on success, 1 when no image could be processed.
int cmd_generate(const GenerateRequest& request);

/// Evaluates predictions against ground truth and writes the metrics JSON. Returns 0.
int cmd_eval(const EvalRequest& request);

/// Writes PGM dumps of similarity rows, weights, Fiedler/boundary/augmented maps, the
/// foreground, labeled components and selected masks, plus `summary.json`. Returns 0.
int cmd_inspect(const InspectRequest& request);

/// One successfully processed image.
struct ProcessedImage {
  std::string image_id;
  GridGeometry geometry;
  ImageResult result;
};

/// Annotation document for processed images, in the given order. Image ids are the numeric
/// image_id strings when every one of them is a unique integer, otherwise 1..n.
AnnotationSet build_annotation_set(const std::vector<ProcessedImage>& images, const PipelineConfig& config);

/// Logging level from CUTONCE_LOG (error, info or debug; default info).
void configure_logging();

}  // namespace cutonce
