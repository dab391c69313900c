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
#include <string_view>

#include "json.hpp"

#include "cutonce/affinity.hpp"
#include "cutonce/spectral.hpp"

namespace cutonce {

struct PipelineConfig {
  AffinityParams affinity;    // k = 10, t0 = 1.0, alpha = 0.5, tau_ncut = 0.15
  double tau_filter = 0.95;   // cumulative saliency share kept by the rank filter
  int neighborhood = 8;
  SolverKind solver = SolverKind::dense;
  int workers = 1;

  /// Throws ParameterError on any out-of-domain value.
  void validate() const;
  nlohmann::ordered_json to_json() const;
};

/// Sets one option from its textual value. Keys use the flag spelling with or without
/// dashes: k, t0, alpha, tau_ncut / tau-ncut, tau, neighborhood, solver, workers.
void apply_setting(PipelineConfig& config, std::string_view key, std::string_view value);

/// Reads flat `key = value` lines ('#' starts a comment, values may be quoted) into `config`.
/// Throws ParameterError naming the line for unknown keys or malformed lines.
void load_config_file(const std::filesystem::path& path, PipelineConfig& config);

}  // namespace cutonce
