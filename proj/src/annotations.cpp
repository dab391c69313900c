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

#include "cutonce/annotations.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "cutonce/errors.hpp"

namespace cutonce {

using ojson = nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw FormatError(path + ": " + what);
}

const ojson& member(const ojson& obj, const char* key, const std::string& path) {
  if (!obj.contains(key)) fail(path, std::string("missing key '") + key + "'");
  return obj.at(key);
}

std::int64_t as_int(const ojson& v, const std::string& path) {
  if (!v.is_number_integer()) fail(path, "expected an integer");
  return v.get<std::int64_t>();
}

double as_number(const ojson& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  return v.get<double>();
}

int as_positive_int(const ojson& v, const std::string& path) {
  const auto value = as_int(v, path);
  if (value <= 0 || value > std::numeric_limits<int>::max()) fail(path, "expected a positive integer");
  return static_cast<int>(value);
}

RleMask parse_rle(const ojson& seg, const std::string& path) {
  if (!seg.is_object()) fail(path, "segmentation must be an uncompressed RLE object");
  const auto& size = member(seg, "size", path);
  if (!size.is_array() || size.size() != 2) fail(path + ".size", "expected [height, width]");
  RleMask rle;
  rle.height = as_positive_int(size[0], path + ".size[0]");
  rle.width = as_positive_int(size[1], path + ".size[1]");
  const auto& counts = member(seg, "counts", path);
  if (!counts.is_array()) fail(path + ".counts", "expected an integer list (compressed RLE is not supported)");
  rle.counts.reserve(counts.size());
  std::int64_t total = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const auto where = path + ".counts[" + std::to_string(i) + "]";
    const auto value = as_int(counts[i], where);
    if (value < 0 || (i > 0 && value == 0)) fail(where, "run lengths after the first must be >= 1");
    if (value > std::numeric_limits<std::uint32_t>::max()) fail(where, "run length out of range");
    rle.counts.push_back(static_cast<std::uint32_t>(value));
    total += value;
  }
  if (total != static_cast<std::int64_t>(rle.height) * rle.width) {
    fail(path + ".counts", "run lengths sum to " + std::to_string(total) + ", expected " +
                               std::to_string(static_cast<std::int64_t>(rle.height) * rle.width));
  }
  return rle;
}

ojson rle_json(const RleMask& rle) {
  ojson seg;
  seg["size"] = {rle.height, rle.width};
  seg["counts"] = rle.counts;
  return seg;
}

}  // namespace

RleMask rle_encode(const BoolMap& mask) {
  RleMask rle;
  rle.height = static_cast<int>(mask.rows());
  rle.width = static_cast<int>(mask.cols());
  bool current = false;
  std::uint32_t run = 0;
  for (Eigen::Index c = 0; c < mask.cols(); ++c) {
    for (Eigen::Index r = 0; r < mask.rows(); ++r) {
      if (mask(r, c) != current) {
        rle.counts.push_back(run);
        run = 0;
        current = !current;
      }
      ++run;
    }
  }
  rle.counts.push_back(run);
  return rle;
}

BoolMap rle_decode(const RleMask& rle) {
  std::int64_t total = 0;
  for (auto c : rle.counts) total += c;
  const auto expected = static_cast<std::int64_t>(rle.height) * rle.width;
  if (rle.height <= 0 || rle.width <= 0 || total != expected) {
    throw FormatError("rle_decode: counts sum to " + std::to_string(total) + " but size is " +
                      std::to_string(rle.height) + "x" + std::to_string(rle.width));
  }
  BoolMap mask(rle.height, rle.width);
  std::int64_t pos = 0;
  bool value = false;
  for (auto run : rle.counts) {
    for (std::uint32_t i = 0; i < run; ++i, ++pos) {
      mask(pos % rle.height, pos / rle.height) = value;
    }
    value = !value;
  }
  return mask;
}

std::int64_t rle_area(const RleMask& rle) {
  std::int64_t area = 0;
  for (std::size_t i = 1; i < rle.counts.size(); i += 2) area += rle.counts[i];
  return area;
}

std::array<double, 4> rle_bbox(const RleMask& rle) {
  const std::int64_t h = rle.height;
  std::int64_t min_x = std::numeric_limits<std::int64_t>::max();
  std::int64_t max_x = -1;
  std::int64_t min_y = std::numeric_limits<std::int64_t>::max();
  std::int64_t max_y = -1;
  std::int64_t pos = 0;
  for (std::size_t i = 0; i < rle.counts.size(); ++i) {
    const std::int64_t run = rle.counts[i];
    if (i % 2 == 1 && run > 0) {
      const std::int64_t first = pos;
      const std::int64_t last = pos + run - 1;
      min_x = std::min(min_x, first / h);
      max_x = std::max(max_x, last / h);
      if (first / h == last / h) {
        min_y = std::min(min_y, first % h);
        max_y = std::max(max_y, last % h);
      } else {
        // A run that wraps a column covers the bottom of one column and the top of the next.
        min_y = 0;
        max_y = h - 1;
      }
    }
    pos += run;
  }
  if (max_x < 0) return {0.0, 0.0, 0.0, 0.0};
  return {static_cast<double>(min_x), static_cast<double>(min_y), static_cast<double>(max_x - min_x + 1),
          static_cast<double>(max_y - min_y + 1)};
}

std::int64_t rle_intersection(const RleMask& a, const RleMask& b) {
  if (a.height != b.height || a.width != b.width) {
    throw ValidationError("rle_intersection: masks differ in size");
  }
  std::size_t ia = 0;
  std::size_t ib = 0;
  std::int64_t left_a = a.counts.empty() ? 0 : a.counts[0];
  std::int64_t left_b = b.counts.empty() ? 0 : b.counts[0];
  std::int64_t overlap = 0;
  while (ia < a.counts.size() && ib < b.counts.size()) {
    if (left_a == 0) {
      if (++ia < a.counts.size()) left_a = a.counts[ia];
      continue;
    }
    if (left_b == 0) {
      if (++ib < b.counts.size()) left_b = b.counts[ib];
      continue;
    }
    const std::int64_t step = std::min(left_a, left_b);
    if (ia % 2 == 1 && ib % 2 == 1) overlap += step;
    left_a -= step;
    left_b -= step;
  }
  return overlap;
}

AnnotationRecord make_record(std::int64_t id, std::int64_t image_id, const BoolMap& mask, double score) {
  AnnotationRecord record;
  record.id = id;
  record.image_id = image_id;
  record.category_id = 1;
  record.segmentation = rle_encode(mask);
  record.area = rle_area(record.segmentation);
  record.bbox = rle_bbox(record.segmentation);
  record.score = score;
  return record;
}

std::string to_json_text(const AnnotationSet& set) {
  ojson doc;
  doc["info"] = set.info;
  doc["images"] = ojson::array();
  for (const auto& image : set.images) {
    ojson entry;
    entry["id"] = image.id;
    entry["file_name"] = image.file_name;
    entry["width"] = image.width;
    entry["height"] = image.height;
    doc["images"].push_back(std::move(entry));
  }
  doc["annotations"] = ojson::array();
  for (const auto& record : set.annotations) {
    ojson entry;
    entry["id"] = record.id;
    entry["image_id"] = record.image_id;
    entry["category_id"] = record.category_id;
    entry["segmentation"] = rle_json(record.segmentation);
    entry["area"] = record.area;
    entry["bbox"] = record.bbox;
    entry["score"] = record.score;
    doc["annotations"].push_back(std::move(entry));
  }
  doc["categories"] = ojson::array({ojson{{"id", 1}, {"name", "object"}}});
  return doc.dump() + "\n";
}

AnnotationSet from_json_text(const std::string& text) {
  ojson doc;
  try {
    doc = ojson::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail("$", e.what());
  }
  if (!doc.is_object()) fail("$", "expected an object");

  AnnotationSet set;
  if (doc.contains("info")) {
    if (!doc.at("info").is_object()) fail("$.info", "expected an object");
    set.info = doc.at("info");
  }

  const auto& images = member(doc, "images", "$");
  if (!images.is_array()) fail("$.images", "expected an array");
  for (std::size_t i = 0; i < images.size(); ++i) {
    const auto path = "$.images[" + std::to_string(i) + "]";
    const auto& entry = images[i];
    if (!entry.is_object()) fail(path, "expected an object");
    ImageEntry image;
    image.id = as_int(member(entry, "id", path), path + ".id");
    if (entry.contains("file_name")) {
      if (!entry.at("file_name").is_string()) fail(path + ".file_name", "expected a string");
      image.file_name = entry.at("file_name").get<std::string>();
    }
    image.width = as_positive_int(member(entry, "width", path), path + ".width");
    image.height = as_positive_int(member(entry, "height", path), path + ".height");
    set.images.push_back(std::move(image));
  }

  const auto& annotations = member(doc, "annotations", "$");
  if (!annotations.is_array()) fail("$.annotations", "expected an array");
  for (std::size_t i = 0; i < annotations.size(); ++i) {
    const auto path = "$.annotations[" + std::to_string(i) + "]";
    const auto& entry = annotations[i];
    if (!entry.is_object()) fail(path, "expected an object");
    AnnotationRecord record;
    record.id = as_int(member(entry, "id", path), path + ".id");
    record.image_id = as_int(member(entry, "image_id", path), path + ".image_id");
    if (entry.contains("category_id")) record.category_id = as_int(entry.at("category_id"), path + ".category_id");
    record.segmentation = parse_rle(member(entry, "segmentation", path), path + ".segmentation");

    const auto area_path = path + ".area";
    record.area = entry.contains("area") ? as_int(entry.at("area"), area_path) : rle_area(record.segmentation);
    if (record.area != rle_area(record.segmentation)) {
      fail(area_path, "area " + std::to_string(record.area) + " differs from mask popcount " +
                          std::to_string(rle_area(record.segmentation)));
    }

    const auto tight = rle_bbox(record.segmentation);
    if (entry.contains("bbox")) {
      const auto& box = entry.at("bbox");
      if (!box.is_array() || box.size() != 4) fail(path + ".bbox", "expected [x, y, w, h]");
      for (std::size_t c = 0; c < 4; ++c) {
        record.bbox[c] = as_number(box[c], path + ".bbox[" + std::to_string(c) + "]");
        // One pixel of slack for boxes produced by other tools (e.g. from polygons).
        if (std::abs(record.bbox[c] - tight[c]) > 1.0) {
          fail(path + ".bbox", "box is inconsistent with the mask extents");
        }
      }
    } else {
      record.bbox = tight;
    }
    if (entry.contains("score")) record.score = as_number(entry.at("score"), path + ".score");
    set.annotations.push_back(std::move(record));
  }
  return set;
}

void export_annotations(const AnnotationSet& set, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError(path.string() + ": cannot open for writing");
  out << to_json_text(set);
  if (!out) throw FormatError(path.string() + ": write failed");
}

AnnotationSet import_annotations(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(path.string() + ": cannot open");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return from_json_text(buffer.str());
}

}  // namespace cutonce
