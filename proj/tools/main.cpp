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

#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include "CLI11.hpp"

#include "cutonce/commands.hpp"
#include "cutonce/errors.hpp"

namespace {

// Flags shared by generate and inspect. Values land in optionals so that
// flags override the config file regardless of declaration order.
struct PipelineFlags {
  std::string config_file;
  std::optional<int> k;
  std::optional<double> t0;
  std::optional<double> alpha;
  std::optional<double> tau_ncut;
  std::optional<double> tau;
  std::optional<int> neighborhood;
  std::optional<std::string> solver;
  std::optional<int> workers;

  void attach(CLI::App& app) {
    app.add_option("--config", config_file, "Flat key = value config file")->check(CLI::ExistingFile);
    app.add_option("--k", k, "Neighbours for the local density (default 10)");
    app.add_option("--t0", t0, "Base temperature (default 1.0)");
    app.add_option("--alpha", alpha, "Density modulation (default 0.5)");
    app.add_option("--tau-ncut", tau_ncut, "Contrast threshold on edge weights (default 0.15)");
    app.add_option("--tau", tau, "Rank filter cumulative saliency share (default 0.95)");
    app.add_option("--neighborhood", neighborhood, "Boundary neighbourhood, 4 or 8 (default 8)");
    app.add_option("--solver", solver, "Eigen solver: dense or iterative (default dense)");
    app.add_option("--workers", workers, "Images processed concurrently");
  }

  cutonce::PipelineConfig resolve() const {
    cutonce::PipelineConfig config;
    config.workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    if (!config_file.empty()) cutonce::load_config_file(config_file, config);
    if (k) config.affinity.k = *k;
    if (t0) config.affinity.t0 = *t0;
    if (alpha) config.affinity.alpha = *alpha;
    if (tau_ncut) config.affinity.tau_ncut = *tau_ncut;
    if (tau) config.tau_filter = *tau;
    if (neighborhood) config.neighborhood = *neighborhood;
    if (solver) config.solver = cutonce::parse_solver_kind(*solver);
    if (workers) config.workers = *workers;
    config.validate();
    return config;
  }
};

}  // namespace

int main(int argc, char** argv) {
  cutonce::configure_logging();
  CLI::App app{"Single-pass normalized-cut instance masks from patch feature grids"};
  app.require_subcommand(1);

  cutonce::GenerateRequest generate;
  PipelineFlags generate_flags;
  auto* gen = app.add_subcommand("generate", "Write class-agnostic annotations for a directory of feature files");
  gen->add_option("--features", generate.features_dir, "Directory of <stem>.npy + <stem>.json files")->required();
  gen->add_option("--out", generate.out, "Output annotation JSON")->required();
  generate_flags.attach(*gen);

  cutonce::EvalRequest eval;
  auto* ev = app.add_subcommand("eval", "Score predictions against ground-truth annotations");
  ev->add_option("--pred", eval.predictions, "Prediction annotation JSON")->required()->check(CLI::ExistingFile);
  ev->add_option("--gt", eval.ground_truth, "Ground-truth annotation JSON")->required()->check(CLI::ExistingFile);
  ev->add_option("--out", eval.out, "Metrics JSON")->required();
  ev->add_option("--iou-thresholds", eval.thresholds, "IoU thresholds (default 0.50:0.05:0.95)")->delimiter(',');

  cutonce::InspectRequest inspect;
  PipelineFlags inspect_flags;
  auto* ins = app.add_subcommand("inspect", "Dump intermediate maps for one feature file as PGM images");
  ins->add_option("--features", inspect.feature_file, "Feature .npy file")->required()->check(CLI::ExistingFile);
  ins->add_option("--out", inspect.out_dir, "Output directory")->required();
  ins->add_option("--similarity-rows", inspect.similarity_rows, "Similarity rows to dump (default 4)");
  inspect_flags.attach(*ins);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Help and version exit 0; every usage error maps to 2.
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) {
      generate.config = generate_flags.resolve();
      return cutonce::cmd_generate(generate);
    }
    if (ev->parsed()) return cutonce::cmd_eval(eval);
    inspect.config = inspect_flags.resolve();
    return cutonce::cmd_inspect(inspect);
  } catch (const cutonce::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
