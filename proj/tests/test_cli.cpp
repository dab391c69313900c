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

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "cutonce/annotations.hpp"
#include "cutonce/feature_io.hpp"
#include "cutonce/instances.hpp"
#include "doctest.h"
#include "json.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;
using namespace cutonce;
using cutonce::testing::TempDir;

namespace {

struct Run {
  int status = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

std::string quoted(const fs::path& p) { return "'" + p.string() + "'"; }

Run cli(const TempDir& dir, const std::string& args) {
  const auto out = dir / "stdout.txt";
  const auto err = dir / "stderr.txt";
  const std::string command = "CUTONCE_LOG=error " + quoted(CUTONCE_CLI_PATH) + " " + args + " >" + quoted(out) +
                              " 2>" + quoted(err);
  const int raw = std::system(command.c_str());
  Run run;
  run.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  run.out = slurp(out);
  run.err = slurp(err);
  return run;
}

// Three planted scenes with numeric ids; returns the ground truth as pixel-level annotations.
AnnotationSet write_scenes(const fs::path& dir, int count = 3) {
  fs::create_directories(dir);
  std::mt19937_64 rng(404);
  AnnotationSet gt;
  std::int64_t next = 1;
  for (int i = 0; i < count; ++i) {
    const std::string id = std::to_string(101 + i);
    const auto scene = cutonce::testing::planted_scene(rng, 14, 16, 64, 1 + i % 2, 0.05, id);
    save_feature_grid(scene.grid, dir / (id + ".npy"));
    const auto& g = scene.grid.geometry();
    gt.images.push_back({101 + i, id, g.orig_width, g.orig_height});
    for (const auto& object : scene.objects) {
      gt.annotations.push_back(make_record(next++, 101 + i, upsample_mask(object, g), 1.0));
    }
  }
  return gt;
}

nlohmann::json read_json(const fs::path& path) { return nlohmann::json::parse(slurp(path)); }

}  // namespace

TEST_CASE("generate writes one image entry per feature file") {
  TempDir dir;
  write_scenes(dir / "features");
  const auto out = dir / "pseudo.json";
  const Run run = cli(dir, "generate --features " + quoted(dir / "features") + " --out " + quoted(out));
  REQUIRE(run.status == 0);
  const auto doc = read_json(out);
  REQUIRE(doc["images"].size() == 3);
  CHECK(doc["images"][0]["id"] == 101);
  CHECK(doc["images"][2]["file_name"] == "103");
  CHECK(doc["images"][0]["width"] == 128);
  CHECK(doc["images"][0]["height"] == 112);
  CHECK(doc["annotations"].size() >= 3);
  CHECK(doc["info"]["config"]["k"] == 10);
  CHECK(doc["info"]["config"]["tau"] == 0.95);
  CHECK(doc["categories"].size() == 1);

  // Timing table: header plus one row per file.
  std::ifstream tsv(out.string() + ".timing.tsv");
  REQUIRE(tsv);
  std::string line;
  int rows = 0;
  std::getline(tsv, line);
  CHECK(line.rfind("file\timage_id\t", 0) == 0);
  while (std::getline(tsv, line)) {
    CHECK(line.size() >= 3);
    CHECK(line.substr(line.size() - 3) == "\tok");
    ++rows;
  }
  CHECK(rows == 3);
}

TEST_CASE("generate output is byte-identical across reruns and worker counts") {
  TempDir dir;
  write_scenes(dir / "features", 4);
  const auto args = [&](const std::string& name, int workers) {
    return "generate --features " + quoted(dir / "features") + " --out " + quoted(dir / name) +
           " --workers " + std::to_string(workers) + " --config " + quoted(dir / "w.toml");
  };
  // Worker count is echoed into the output, so pin it through the config file for the comparison.
  std::ofstream(dir / "w.toml") << "workers = 1\n";
  REQUIRE(cli(dir, args("a.json", 1)).status == 0);
  REQUIRE(cli(dir, args("b.json", 1)).status == 0);
  CHECK(slurp(dir / "a.json") == slurp(dir / "b.json"));

  REQUIRE(cli(dir, args("c.json", 3)).status == 0);
  auto a = read_json(dir / "a.json");
  auto c = read_json(dir / "c.json");
  CHECK(c["info"]["config"]["workers"] == 3);
  a["info"].erase("config");
  c["info"].erase("config");
  CHECK(a == c);
}

TEST_CASE("corrupt feature files are reported and skipped") {
  TempDir dir;
  write_scenes(dir / "features");
  std::ofstream(dir / "features" / "broken.npy") << "not an array";
  std::ofstream(dir / "features" / "broken.json") << "{}";
  fs::copy_file(dir / "features" / "101.npy", dir / "features" / "orphan.npy");

  const auto out = dir / "pseudo.json";
  const Run run = cli(dir, "generate --features " + quoted(dir / "features") + " --out " + quoted(out));
  REQUIRE(run.status == 0);
  CHECK(run.err.find("2 of 5 feature files failed") != std::string::npos);
  CHECK(run.err.find("broken.npy") != std::string::npos);
  CHECK(run.err.find("orphan.npy") != std::string::npos);
  CHECK(read_json(out)["images"].size() == 3);

  const std::string tsv = slurp(out.string() + ".timing.tsv");
  CHECK(tsv.find("broken.npy\t-") != std::string::npos);
  CHECK(tsv.find("\terror\n") != std::string::npos);
}

TEST_CASE("generate fails when nothing can be processed") {
  TempDir dir;
  fs::create_directories(dir / "empty");
  CHECK(cli(dir, "generate --features " + quoted(dir / "empty") + " --out " + quoted(dir / "x.json")).status != 0);

  fs::create_directories(dir / "bad");
  std::ofstream(dir / "bad" / "a.npy") << "junk";
  const Run run = cli(dir, "generate --features " + quoted(dir / "bad") + " --out " + quoted(dir / "y.json"));
  CHECK(run.status != 0);
  CHECK(run.err.find("1 of 1 feature files failed") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "y.json"));
}

TEST_CASE("flags override the config file") {
  TempDir dir;
  write_scenes(dir / "features", 1);
  std::ofstream(dir / "run.toml") << "# pinned settings\ntau-ncut = 0.3\nk = 7\nneighborhood = 4\n";
  const auto out = dir / "pseudo.json";
  REQUIRE(cli(dir, "generate --features " + quoted(dir / "features") + " --out " + quoted(out) + " --config " +
                       quoted(dir / "run.toml") + " --tau-ncut 0.15 --solver iterative")
              .status == 0);
  const auto config = read_json(out)["info"]["config"];
  CHECK(config["tau_ncut"] == 0.15);
  CHECK(config["k"] == 7);
  CHECK(config["neighborhood"] == 4);
  CHECK(config["solver"] == "iterative");
}

TEST_CASE("invalid arguments exit with status 2") {
  TempDir dir;
  write_scenes(dir / "features", 1);
  const std::string base = "generate --features " + quoted(dir / "features") + " --out " + quoted(dir / "o.json");
  CHECK(cli(dir, base + " --neighborhood 6").status == 2);
  CHECK(cli(dir, base + " --tau 0").status == 2);
  CHECK(cli(dir, base + " --solver lobpcg").status == 2);
  CHECK(cli(dir, base + " --k ten").status == 2);
  const Run run = cli(dir, base + " --k 0");
  CHECK(run.status == 2);
  CHECK(run.err.find("error:") != std::string::npos);
  CHECK(cli(dir, "frobnicate").status == 2);
}

TEST_CASE("eval scores planted pseudo masks against their ground truth") {
  TempDir dir;
  const AnnotationSet gt = write_scenes(dir / "features");
  export_annotations(gt, dir / "gt.json");
  REQUIRE(cli(dir, "generate --features " + quoted(dir / "features") + " --out " + quoted(dir / "pred.json")).status ==
          0);
  const Run run = cli(dir, "eval --pred " + quoted(dir / "pred.json") + " --gt " + quoted(dir / "gt.json") +
                               " --out " + quoted(dir / "metrics.json"));
  REQUIRE(run.status == 0);
  const auto metrics = read_json(dir / "metrics.json");
  CHECK(metrics["ap50"] == doctest::Approx(1.0));
  CHECK(metrics["ap"] == doctest::Approx(1.0));
  CHECK(metrics["ar100"] == doctest::Approx(1.0));
  CHECK(metrics.contains("segm"));
  CHECK(metrics.contains("bbox"));
  CHECK_FALSE(run.out.empty());

  REQUIRE(cli(dir, "eval --pred " + quoted(dir / "gt.json") + " --gt " + quoted(dir / "gt.json") + " --out " +
                       quoted(dir / "self.json") + " --iou-thresholds 0.5,0.75")
              .status == 0);
  const auto self = read_json(dir / "self.json");
  CHECK(self["ap50"] == 1.0);
  CHECK(self["segm"]["per_threshold"].size() == 2);
}

TEST_CASE("eval rejects malformed annotation files") {
  TempDir dir;
  std::ofstream(dir / "bad.json") << "{\"images\": 3}";
  export_annotations(AnnotationSet{}, dir / "empty.json");
  const Run run = cli(dir, "eval --pred " + quoted(dir / "bad.json") + " --gt " + quoted(dir / "empty.json") +
                               " --out " + quoted(dir / "m.json"));
  CHECK(run.status == 2);
  CHECK(run.err.find("$.images") != std::string::npos);
}

TEST_CASE("inspect dumps intermediate maps") {
  TempDir dir;
  write_scenes(dir / "features", 1);
  const auto out = dir / "maps";
  REQUIRE(cli(dir, "inspect --features " + quoted(dir / "features" / "101.npy") + " --out " + quoted(out) +
                       " --similarity-rows 2")
              .status == 0);
  for (const char* name : {"density.pgm", "weights.pgm", "fiedler.pgm", "boundary.pgm", "augmented.pgm",
                           "foreground.pgm", "components.pgm", "mask_0.pgm", "summary.json"}) {
    CHECK_MESSAGE(fs::exists(out / name), std::string(name));
  }
  int rows = 0;
  for (const auto& entry : fs::directory_iterator(out)) {
    if (entry.path().filename().string().rfind("similarity_row_", 0) == 0) ++rows;
  }
  CHECK(rows == 2);
  const std::string header = slurp(out / "fiedler.pgm").substr(0, 2);
  CHECK(header == "P5");

  const auto summary = read_json(out / "summary.json");
  CHECK(summary["image_id"] == "101");
  CHECK(summary["masks"].size() == 1);
  CHECK(summary["residual"].get<double>() <= 1e-6);
}
