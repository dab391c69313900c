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

#include "cutonce/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "cutonce/errors.hpp"

namespace cutonce {

std::vector<double> EvalOptions::default_iou_thresholds() {
  std::vector<double> out;
  for (int i = 0; i < 10; ++i) out.push_back(0.5 + 0.05 * i);
  return out;
}

double mask_iou(const RleMask& a, const RleMask& b) {
  const auto inter = rle_intersection(a, b);
  const auto uni = rle_area(a) + rle_area(b) - inter;
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

double box_iou(const std::array<double, 4>& a, const std::array<double, 4>& b) {
  const double iw = std::min(a[0] + a[2], b[0] + b[2]) - std::max(a[0], b[0]);
  const double ih = std::min(a[1] + a[3], b[1] + b[3]) - std::max(a[1], b[1]);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  const double uni = a[2] * a[3] + b[2] * b[3] - inter;
  return uni <= 0.0 ? 0.0 : inter / uni;
}

MatchResult greedy_match(const std::vector<std::vector<double>>& ious, double threshold) {
  MatchResult out;
  out.true_positive.assign(ious.size(), false);
  out.matched_gt.assign(ious.size(), -1);
  std::vector<bool> taken;
  for (std::size_t d = 0; d < ious.size(); ++d) {
    if (taken.size() < ious[d].size()) taken.resize(ious[d].size(), false);
    int best = -1;
    double best_iou = threshold;
    for (std::size_t g = 0; g < ious[d].size(); ++g) {
      if (taken[g]) continue;
      const double iou = ious[d][g];
      if (iou >= threshold && (best < 0 || iou > best_iou)) {
        best = static_cast<int>(g);
        best_iou = iou;
      }
    }
    if (best >= 0) {
      taken[static_cast<std::size_t>(best)] = true;
      out.true_positive[d] = true;
      out.matched_gt[d] = best;
    }
  }
  return out;
}

PrCurve pr_curve(const std::vector<double>& scores, const std::vector<bool>& true_positive,
                 std::int64_t num_gt) {
  if (num_gt <= 0) throw ContractError("pr_curve: need at least one ground-truth instance");
  if (scores.size() != true_positive.size()) throw ContractError("pr_curve: size mismatch");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  std::vector<double> recall(order.size());
  std::vector<double> precision(order.size());
  double tp = 0.0;
  double fp = 0.0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    (true_positive[order[i]] ? tp : fp) += 1.0;
    recall[i] = tp / static_cast<double>(num_gt);
    precision[i] = tp / (tp + fp);
  }
  for (std::size_t i = precision.size(); i-- > 1;) {
    precision[i - 1] = std::max(precision[i - 1], precision[i]);
  }

  PrCurve curve;
  curve.max_recall = recall.empty() ? 0.0 : recall.back();
  // Same grid as numpy.linspace(0, 1, 101): i * 0.01 with the end point pinned to 1.
  for (int i = 0; i <= 100; ++i) curve.recall_points.push_back(i == 100 ? 1.0 : i * 0.01);
  double sum = 0.0;
  for (const double r : curve.recall_points) {
    const auto it = std::lower_bound(recall.begin(), recall.end(), r);
    const double p = it == recall.end() ? 0.0 : precision[static_cast<std::size_t>(it - recall.begin())];
    curve.precision.push_back(p);
    sum += p;
  }
  curve.ap = sum / static_cast<double>(curve.recall_points.size());
  return curve;
}

Metrics evaluate(const AnnotationSet& predictions, const AnnotationSet& ground_truth,
                 const EvalOptions& options, IouType type) {
  if (options.iou_thresholds.empty()) throw ParameterError("evaluate: no IoU thresholds");
  for (double t : options.iou_thresholds) {
    if (!(t > 0.0 && t <= 1.0)) throw ParameterError("evaluate: IoU thresholds must lie in (0, 1]");
  }
  if (options.max_detections < 1) throw ParameterError("evaluate: max_detections must be >= 1");

  std::unordered_map<std::int64_t, std::size_t> image_index;
  for (std::size_t i = 0; i < ground_truth.images.size(); ++i) {
    if (!image_index.emplace(ground_truth.images[i].id, i).second) {
      throw ValidationError("evaluate: duplicate ground-truth image id " + std::to_string(ground_truth.images[i].id));
    }
  }
  const std::size_t n_images = ground_truth.images.size();
  std::vector<std::vector<const AnnotationRecord*>> dets(n_images);
  std::vector<std::vector<const AnnotationRecord*>> gts(n_images);
  for (const auto& record : ground_truth.annotations) {
    const auto it = image_index.find(record.image_id);
    if (it == image_index.end()) {
      throw ValidationError("evaluate: ground-truth annotation " + std::to_string(record.id) +
                            " refers to unknown image " + std::to_string(record.image_id));
    }
    gts[it->second].push_back(&record);
  }
  for (const auto& record : predictions.annotations) {
    const auto it = image_index.find(record.image_id);
    if (it == image_index.end()) {
      throw ValidationError("evaluate: prediction " + std::to_string(record.id) + " refers to unknown image " +
                            std::to_string(record.image_id));
    }
    dets[it->second].push_back(&record);
  }

  Metrics metrics;
  for (std::size_t i = 0; i < n_images; ++i) {
    auto& d = dets[i];
    std::stable_sort(d.begin(), d.end(), [](const AnnotationRecord* a, const AnnotationRecord* b) {
      return a->score > b->score;
    });
    if (d.size() > static_cast<std::size_t>(options.max_detections)) d.resize(static_cast<std::size_t>(options.max_detections));
    metrics.num_gt += static_cast<std::int64_t>(gts[i].size());
    metrics.num_detections += static_cast<std::int64_t>(d.size());
  }

  std::vector<std::vector<std::vector<double>>> ious(n_images);
  for (std::size_t i = 0; i < n_images; ++i) {
    for (const auto* det : dets[i]) {
      std::vector<double> row;
      for (const auto* gt : gts[i]) {
        row.push_back(type == IouType::segm ? mask_iou(det->segmentation, gt->segmentation)
                                            : box_iou(det->bbox, gt->bbox));
      }
      ious[i].push_back(std::move(row));
    }
  }

  if (metrics.num_gt == 0) return metrics;

  double ap_sum = 0.0;
  double recall_sum = 0.0;
  for (double threshold : options.iou_thresholds) {
    std::vector<double> scores;
    std::vector<bool> tp;
    for (std::size_t i = 0; i < n_images; ++i) {
      const auto match = greedy_match(ious[i], threshold);
      for (std::size_t k = 0; k < dets[i].size(); ++k) {
        scores.push_back(dets[i][k]->score);
        tp.push_back(match.true_positive[k]);
      }
    }
    const auto curve = pr_curve(scores, tp, metrics.num_gt);
    metrics.per_threshold.push_back({threshold, curve.ap, curve.max_recall});
    ap_sum += curve.ap;
    recall_sum += curve.max_recall;
    if (std::abs(threshold - 0.5) < 1e-12) metrics.ap50 = curve.ap;
  }
  const auto n_thr = static_cast<double>(options.iou_thresholds.size());
  metrics.ap = ap_sum / n_thr;
  metrics.ar100 = recall_sum / n_thr;
  return metrics;
}

nlohmann::ordered_json metrics_json(const Metrics& metrics) {
  nlohmann::ordered_json out;
  out["ap50"] = metrics.ap50;
  out["ap"] = metrics.ap;
  out["ar100"] = metrics.ar100;
  out["num_gt"] = metrics.num_gt;
  out["num_detections"] = metrics.num_detections;
  out["per_threshold"] = nlohmann::ordered_json::array();
  for (const auto& t : metrics.per_threshold) {
    out["per_threshold"].push_back({{"iou", t.iou}, {"ap", t.ap}, {"recall", t.recall}});
  }
  return out;
}

std::string metrics_table(const Metrics& segm, const Metrics& bbox) {
  std::ostringstream out;
  char line[128];
  std::snprintf(line, sizeof(line), "%-8s %10s %10s %10s %10s\n", "IoU", "segm AP", "segm AR", "bbox AP", "bbox AR");
  out << line;
  for (std::size_t i = 0; i < segm.per_threshold.size(); ++i) {
    const auto& s = segm.per_threshold[i];
    const auto& b = i < bbox.per_threshold.size() ? bbox.per_threshold[i] : ThresholdMetrics{s.iou, -1.0, -1.0};
    std::snprintf(line, sizeof(line), "%-8.2f %10.4f %10.4f %10.4f %10.4f\n", s.iou, s.ap, s.recall, b.ap, b.recall);
    out << line;
  }
  std::snprintf(line, sizeof(line), "AP50  segm %.4f  bbox %.4f\n", segm.ap50, bbox.ap50);
  out << line;
  std::snprintf(line, sizeof(line), "AP    segm %.4f  bbox %.4f\n", segm.ap, bbox.ap);
  out << line;
  std::snprintf(line, sizeof(line), "AR100 segm %.4f  bbox %.4f\n", segm.ar100, bbox.ar100);
  out << line;
  return out.str();
}

}  // namespace cutonce
