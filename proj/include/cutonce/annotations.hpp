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
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "cutonce/types.hpp"

namespace cutonce {

/// Uncompressed COCO run-length encoding: alternating runs of 0s and 1s over the
/// column-major scan, always starting with a (possibly empty) run of 0s.
struct RleMask {
  int height = 0;
  int width = 0;
  std::vector<std::uint32_t> counts;

  friend bool operator==(const RleMask&, const RleMask&) = default;
};

RleMask rle_encode(const BoolMap& mask);
/// Throws FormatError when the counts do not sum to height * width.
BoolMap rle_decode(const RleMask& rle);
/// Number of foreground pixels.
std::int64_t rle_area(const RleMask& rle);
/// Tight [x, y, w, h] box of the foreground, all zero for an empty mask.
std::array<double, 4> rle_bbox(const RleMask& rle);
/// |a & b| computed run against run. Throws ValidationError if sizes differ.
std::int64_t rle_intersection(const RleMask& a, const RleMask& b);

struct ImageEntry {
  std::int64_t id = 0;
  std::string file_name;
  int width = 0;
  int height = 0;

  friend bool operator==(const ImageEntry&, const ImageEntry&) = default;
};

struct AnnotationRecord {
  std::int64_t id = 0;
  std::int64_t image_id = 0;
  std::int64_t category_id = 1;
  RleMask segmentation;
  std::array<double, 4> bbox{};  // x, y, w, h in pixels
  std::int64_t area = 0;
  double score = 1.0;

  friend bool operator==(const AnnotationRecord&, const AnnotationRecord&) = default;
};

/// A class-agnostic COCO-style annotation document.
struct AnnotationSet {
  nlohmann::ordered_json info = nlohmann::ordered_json::object();
  std::vector<ImageEntry> images;
  std::vector<AnnotationRecord> annotations;
};

/// Builds a record whose area and bbox are derived from the mask.
AnnotationRecord make_record(std::int64_t id, std::int64_t image_id, const BoolMap& mask, double score);

/// Canonical text: fixed key order, shortest round-trip floats, compact, LF-terminated.
std::string to_json_text(const AnnotationSet& set);
/// Parses and validates a document. Errors are FormatError messages prefixed by a JSON path.
AnnotationSet from_json_text(const std::string& text);

void export_annotations(const AnnotationSet& set, const std::filesystem::path& path);
AnnotationSet import_annotations(const std::filesystem::path& path);

}  // namespace cutonce
