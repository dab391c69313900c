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

#include "cutonce/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "cutonce/errors.hpp"

namespace cutonce {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ParameterError("invalid value '" + std::string(text) + "' for '" + std::string(key) + "'");
  }
  return value;
}

}  // namespace

void PipelineConfig::validate() const {
  if (affinity.k < 1) throw ParameterError("k must be >= 1");
  if (!std::isfinite(affinity.t0) || !std::isfinite(affinity.alpha)) {
    throw ParameterError("t0 and alpha must be finite");
  }
  if (!std::isfinite(affinity.tau_ncut)) throw ParameterError("tau_ncut must be finite");
  if (!(tau_filter > 0.0 && tau_filter < 1.0)) throw ParameterError("tau must lie in (0, 1)");
  if (neighborhood != 4 && neighborhood != 8) throw ParameterError("neighborhood must be 4 or 8");
  if (workers < 1) throw ParameterError("workers must be >= 1");
}

nlohmann::ordered_json PipelineConfig::to_json() const {
  nlohmann::ordered_json out;
  out["k"] = affinity.k;
  out["t0"] = affinity.t0;
  out["alpha"] = affinity.alpha;
  out["tau_ncut"] = affinity.tau_ncut;
  out["tau"] = tau_filter;
  out["neighborhood"] = neighborhood;
  out["solver"] = std::string(to_string(solver));
  out["workers"] = workers;
  return out;
}

void apply_setting(PipelineConfig& config, std::string_view key, std::string_view value) {
  std::string k(key);
  while (!k.empty() && k.front() == '-') k.erase(k.begin());
  for (auto& ch : k) {
    if (ch == '-') ch = '_';
  }
  if (k == "k") {
    config.affinity.k = parse_number<int>(key, value);
  } else if (k == "t0") {
    config.affinity.t0 = parse_number<double>(key, value);
  } else if (k == "alpha") {
    config.affinity.alpha = parse_number<double>(key, value);
  } else if (k == "tau_ncut") {
    config.affinity.tau_ncut = parse_number<double>(key, value);
  } else if (k == "tau") {
    config.tau_filter = parse_number<double>(key, value);
  } else if (k == "neighborhood") {
    config.neighborhood = parse_number<int>(key, value);
  } else if (k == "solver") {
    config.solver = parse_solver_kind(value);
  } else if (k == "workers") {
    config.workers = parse_number<int>(key, value);
  } else {
    throw ParameterError("unknown setting '" + std::string(key) + "'");
  }
}

void load_config_file(const std::filesystem::path& path, PipelineConfig& config) {
  std::ifstream in(path);
  if (!in) throw ParameterError(path.string() + ": cannot open config file");
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::string_view text(line);
    if (const auto hash = text.find('#'); hash != std::string_view::npos) text = text.substr(0, hash);
    text = trim(text);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) {
      throw ParameterError(path.string() + ":" + std::to_string(number) + ": expected key = value");
    }
    const auto key = trim(text.substr(0, eq));
    auto value = trim(text.substr(eq + 1));
    if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') && value.back() == value.front()) {
      value = value.substr(1, value.size() - 2);
    }
    try {
      apply_setting(config, key, value);
    } catch (const ParameterError& e) {
      throw ParameterError(path.string() + ":" + std::to_string(number) + ": " + e.what());
    }
  }
}

}  // namespace cutonce
