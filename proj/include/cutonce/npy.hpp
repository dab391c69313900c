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

#include <cstddef>
#include <filesystem>
#include <vector>

namespace cutonce::npy {

/// A float32 array read from or destined for an NPY container.
struct Float32Array {
  std::vector<std::size_t> shape;
  std::vector<float> data;  // C order
};

/// Reads a little-endian float32, C-ordered NPY file (format version 1.x or 2.x).
/// Throws FormatError on a malformed header or truncated payload.
Float32Array read(const std::filesystem::path& path);

/// Writes an NPY version 1.0 file with descr '<f4' and fortran_order False.
void write(const std::filesystem::path& path, const Float32Array& array);

}  // namespace cutonce::npy
