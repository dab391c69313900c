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

#include "cutonce/npy.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <regex>
#include <sstream>
#include <string>

#include "cutonce/errors.hpp"

namespace cutonce::npy {

static_assert(std::endian::native == std::endian::little,
              "NPY payloads are read by direct copy; big-endian hosts are not supported");

namespace {

constexpr std::array<char, 6> kMagic = {'\x93', 'N', 'U', 'M', 'P', 'Y'};

std::string describe(const std::filesystem::path& path) { return path.string(); }

std::vector<std::size_t> parse_shape(const std::string& text, const std::filesystem::path& path) {
  std::vector<std::size_t> shape;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto first = item.find_first_not_of(" \t");
    if (first == std::string::npos) continue;  // trailing comma of 1-tuples
    const auto last = item.find_last_not_of(" \t");
    const std::string digits = item.substr(first, last - first + 1);
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos) {
      throw FormatError(describe(path) + ": bad shape entry '" + digits + "'");
    }
    shape.push_back(static_cast<std::size_t>(std::stoull(digits)));
  }
  return shape;
}

}  // namespace

Float32Array read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(describe(path) + ": cannot open");

  std::array<char, 6> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw FormatError(describe(path) + ": missing NPY magic");

  unsigned char version[2] = {0, 0};
  in.read(reinterpret_cast<char*>(version), 2);
  if (!in) throw FormatError(describe(path) + ": truncated version");

  std::uint32_t header_len = 0;
  if (version[0] == 1) {
    unsigned char b[2];
    in.read(reinterpret_cast<char*>(b), 2);
    header_len = static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8);
  } else if (version[0] == 2 || version[0] == 3) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    header_len = static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
                 (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
  } else {
    throw FormatError(describe(path) + ": unsupported NPY version " + std::to_string(version[0]));
  }
  if (!in) throw FormatError(describe(path) + ": truncated header length");

  std::string header(header_len, '\0');
  in.read(header.data(), header_len);
  if (!in) throw FormatError(describe(path) + ": truncated header");

  static const std::regex descr_re(R"('descr'\s*:\s*'([^']*)')");
  static const std::regex order_re(R"('fortran_order'\s*:\s*(True|False))");
  static const std::regex shape_re(R"('shape'\s*:\s*\(([^)]*)\))");
  std::smatch m;
  if (!std::regex_search(header, m, descr_re)) throw FormatError(describe(path) + ": header lacks 'descr'");
  if (m[1] != "<f4") {
    throw FormatError(describe(path) + ": expected descr '<f4', found '" + m[1].str() + "'");
  }
  if (!std::regex_search(header, m, order_re)) {
    throw FormatError(describe(path) + ": header lacks 'fortran_order'");
  }
  if (m[1] != "False") throw FormatError(describe(path) + ": fortran_order arrays are not supported");
  if (!std::regex_search(header, m, shape_re)) throw FormatError(describe(path) + ": header lacks 'shape'");

  Float32Array out;
  out.shape = parse_shape(m[1].str(), path);
  std::size_t count = 1;
  for (auto extent : out.shape) count *= extent;

  out.data.resize(count);
  in.read(reinterpret_cast<char*>(out.data.data()), static_cast<std::streamsize>(count * sizeof(float)));
  if (!in) throw FormatError(describe(path) + ": payload shorter than declared shape");
  in.peek();
  if (!in.eof()) throw FormatError(describe(path) + ": trailing bytes after payload");
  return out;
}

void write(const std::filesystem::path& path, const Float32Array& array) {
  std::size_t count = 1;
  for (auto extent : array.shape) count *= extent;
  if (count != array.data.size()) {
    throw ValidationError(describe(path) + ": data size does not match shape");
  }

  std::string shape = "(";
  for (std::size_t i = 0; i < array.shape.size(); ++i) {
    if (i > 0) shape += ", ";
    shape += std::to_string(array.shape[i]);
  }
  if (array.shape.size() == 1) shape += ",";
  shape += ")";

  std::string header = "{'descr': '<f4', 'fortran_order': False, 'shape': " + shape + ", }";
  // magic(6) + version(2) + length(2) + header, padded to a multiple of 64 and newline-terminated.
  const std::size_t unpadded = 10 + header.size() + 1;
  header.append((64 - unpadded % 64) % 64, ' ');
  header.push_back('\n');
  if (header.size() > 0xFFFF) throw FormatError(describe(path) + ": header too large for NPY 1.0");

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError(describe(path) + ": cannot open for writing");
  out.write(kMagic.data(), kMagic.size());
  const char version[2] = {1, 0};
  out.write(version, 2);
  const unsigned char len[2] = {static_cast<unsigned char>(header.size() & 0xFF),
                                static_cast<unsigned char>(header.size() >> 8)};
  out.write(reinterpret_cast<const char*>(len), 2);
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  out.write(reinterpret_cast<const char*>(array.data.data()),
            static_cast<std::streamsize>(array.data.size() * sizeof(float)));
  if (!out) throw FormatError(describe(path) + ": write failed");
}

}  // namespace cutonce::npy
