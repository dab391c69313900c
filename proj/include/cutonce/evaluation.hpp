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

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "cutonce/annotations.hpp"

namespace cutonce {

enum class IouType { segm, bbox };

/// IoU of two same-size masks; 0 when the union is empty.
double mask_iou(const RleMask& a, const RleMask& b);
/// IoU of two [x, y, w, h] boxes.
double box_iou(const std::array<double, 4>& a, const std::array<double, 4>& b);

/// Greedy matching of one image's detections (already in descending score order).
struct MatchResult {
  std::vector<bool> true_positive;  // per detection
  std::vector<int> matched_gt;      // GT index per detection, -1 when unmatched
};

/// Each detection, in order, takes the unmatched GT with the highest IoU >= threshold
/// (lowest GT index on ties). `ious` is detections x GTs.
MatchResult greedy_match(const std::vector<std::vector<double>>& ious, double threshold);

/// 101-point interpolated precision-recall curve.
struct PrCurve {
  std::vector<double> recall_points;  // 0, 0.01, ..., 1
  std::vector<double> precision;      // non-increasing in recall
  double ap = 0.0;
  double max_recall = 0.0;
};

/// Builds the curve from detections pooled over images: `scores` and `true_positive` in any
/// order (they are stably sorted by descending score). `num_gt` must be positive.
PrCurve pr_curve(const std::vector<double>& scores, const std::vector<bool>& true_positive, std::int64_t num_gt);

struct ThresholdMetrics {
  double iou = 0.0;
  double ap = 0.0;
  double recall = 0.0;
};

struct Metrics {
  std::vector<ThresholdMetrics> per_threshold;
  double ap50 = -1.0;   // -1 when 0.5 is not among the thresholds or there is no GT
  double ap = -1.0;     // mean over thresholds
  double ar100 = -1.0;  // mean recall over thresholds with at most 100 detections per image
  std::int64_t num_gt = 0;
  std::int64_t num_detections = 0;
};

struct EvalOptions {
  std::vector<double> iou_thresholds = default_iou_thresholds();
  int max_detections = 100;

  static std::vector<double> default_iou_thresholds();
};

/// Class-agnostic COCO-style evaluation. Throws ValidationError when a prediction refers to
/// an image absent from the ground truth.
Metrics evaluate(const AnnotationSet& predictions, const AnnotationSet& ground_truth,
                 const EvalOptions& options = {}, IouType type = IouType::segm);

/// {"ap50", "ap", "ar100", "per_threshold": [...]} for one IoU type.
nlohmann::ordered_json metrics_json(const Metrics& metrics);
/// Plain-text table with one row per threshold and a summary row.
std::string metrics_table(const Metrics& segm, const Metrics& bbox);

}  // namespace cutonce
