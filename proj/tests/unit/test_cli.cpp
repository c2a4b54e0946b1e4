// Copyright 2026 The Trackforge Authors
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

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "test_support.hpp"
#include "trackforge/config.hpp"
#include "trackforge/util.hpp"

namespace fs = std::filesystem;
using trackforge::read_text_file;
using trackforge::write_text_file;

namespace {

struct Result {
  int code;
  std::string output;
};

Result run(const fs::path& dir, const std::string& args) {
  const fs::path log = dir / "cli_output.txt";
  const std::string cmd = "cd '" + dir.string() + "' && '" + TRACKFORGE_CLI_PATH + "' " + args + " > '" +
                          log.string() + "' 2>&1";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, read_text_file(log)};
}

const std::string kOval = std::string(" --track '") + TRACKFORGE_SOURCE_DIR + "/data/tracks/oval.csv' ";

}  // namespace

TEST_CASE("config init writes a parseable default and a commented template") {
  const auto dir = tftest::temp_dir("cli_init");
  const auto r = run(dir, "config init cfg.json");
  REQUIRE(r.code == 0);
  const auto c = trackforge::load_run_config(dir / "cfg.json");
  CHECK(c.sim.bounds.steering_limit == 30.0);
  CHECK(c.sim.bounds.speed_min == 0.1);
  CHECK(c.sim.bounds.speed_max == 1.0);
  const std::string tmpl = read_text_file(dir / "cfg.template.jsonc");
  CHECK(tmpl.find("//") != std::string::npos);
  CHECK(trackforge::to_json(trackforge::parse_run_config(tmpl)) == read_text_file(dir / "cfg.json"));
}

TEST_CASE("simulate: zero policy is deterministic and reports the episode") {
  const auto dir = tftest::temp_dir("cli_sim");
  const auto a = run(dir, kOval + "--run-id a simulate");
  const auto b = run(dir, kOval + "--run-id b simulate");
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);
  CHECK(read_text_file(dir / "runs/a/trace.csv") == read_text_file(dir / "runs/b/trace.csv"));
  for (const char* key : {"termination:", "lap_time:", "mean_speed:", "smoothness:"}) {
    CHECK(a.output.find(key) != std::string::npos);
  }
  CHECK(fs::exists(dir / "runs/a/manifest.json"));
  CHECK(fs::exists(dir / "runs/a/config.json"));
}

TEST_CASE("simulate: checkpoint errors are reported with a nonzero exit") {
  const auto dir = tftest::temp_dir("cli_badckpt");
  const auto missing = run(dir, kOval + "--run-id m simulate --policy nope.json");
  CHECK(missing.code == 1);
  CHECK(missing.output.find("nope.json") != std::string::npos);

  trackforge::PolicyCheckpoint cp;
  cp.policy = trackforge::Policy::zeros({0.3, 0.8, 1.5});
  std::string text = trackforge::to_json(cp);
  text.replace(text.find("\"rows\": 2"), 9, "\"rows\": \"two\"");
  write_text_file(dir / "bad.json", text);
  const auto bad = run(dir, kOval + "--run-id b simulate --policy bad.json");
  CHECK(bad.code == 1);
  CHECK(bad.output.find("weights.rows") != std::string::npos);

  cp.bounds.speed_max = 2.0;
  write_text_file(dir / "mismatch.json", trackforge::to_json(cp));
  const auto mm = run(dir, kOval + "--run-id c simulate --policy mismatch.json");
  CHECK(mm.code == 1);
  CHECK(mm.output.find("action_bounds") != std::string::npos);

  write_text_file(dir / "truncated.json", trackforge::to_json(cp).substr(0, 40));
  CHECK(run(dir, kOval + "--run-id d simulate --policy truncated.json").code == 1);
}

TEST_CASE("train: smoke run, reproducible checkpoint, nondecreasing best-so-far") {
  const auto dir = tftest::temp_dir("cli_train");
  trackforge::RunConfig c;
  c.train.iterations = 1;
  c.train.population_size = 4;
  c.track = std::string(TRACKFORGE_SOURCE_DIR) + "/data/tracks/oval.csv";
  write_text_file(dir / "cfg.json", trackforge::to_json(c));
  const std::string before = read_text_file(dir / "cfg.json");

  const auto t0 = std::chrono::steady_clock::now();
  const auto a = run(dir, "--config cfg.json --seed 3 --run-id a train");
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  REQUIRE(a.code == 0);
  CHECK(secs < 10.0);
  REQUIRE(run(dir, "--config cfg.json --seed 3 --run-id b train").code == 0);
  CHECK(read_text_file(dir / "runs/a/checkpoint.json") == read_text_file(dir / "runs/b/checkpoint.json"));
  CHECK(read_text_file(dir / "runs/a/train_stats.csv") == read_text_file(dir / "runs/b/train_stats.csv"));
  CHECK(read_text_file(dir / "cfg.json") == before);

  const auto ckpt = trackforge::load_policy_checkpoint(dir / "runs/a/checkpoint.json");
  CHECK(ckpt.master_seed == 3);
  const auto manifest = trackforge::load_run_config(dir / "runs/a/manifest.json");
  CHECK(manifest.seed == 3);

  c.train.iterations = 5;
  write_text_file(dir / "cfg5.json", trackforge::to_json(c));
  REQUIRE(run(dir, "--config cfg5.json --run-id c train").code == 0);
  const std::string stats = read_text_file(dir / "runs/c/train_stats.csv");
  std::istringstream in(stats);
  std::string line;
  std::getline(in, line);
  CHECK(line == "iteration,mean_return,elite_mean_return,best_so_far,noise_std");
  double prev = -1e300;
  int rows = 0;
  while (std::getline(in, line)) {
    std::vector<std::string> cols;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cols.push_back(cell);
    const double best = *trackforge::parse_double(cols.at(3));
    CHECK(best >= prev);
    prev = best;
    ++rows;
  }
  CHECK(rows == 5);

  const auto ev = run(dir, kOval + "--run-id e evaluate --policy runs/c/checkpoint.json --episodes 3");
  CHECK(ev.code == 0);
  CHECK(ev.output.find("completed:") != std::string::npos);
  CHECK(fs::exists(dir / "runs/e/evaluation.csv"));
  CHECK(fs::exists(dir / "runs/e/eval_2.csv"));
}

TEST_CASE("experiment: outputs are byte identical across runs") {
  const auto dir = tftest::temp_dir("cli_exp");
  const std::pair<const char*, const char*> cases[] = {{"velocity-sweep", "velocity_sweep.csv"},
                                                       {"velocity-scatter", "velocity_scatter.csv"},
                                                       {"progress-compare", "progress_compare.csv"},
                                                       {"steering-compare", "steering_compare.csv"},
                                                       {"steering-weighted", "steering_weighted.csv"}};
  for (const auto& [name, file] : cases) {
    REQUIRE(run(dir, std::string("--run-id a_") + name + " experiment " + name).code == 0);
    REQUIRE(run(dir, std::string("--run-id b_") + name + " experiment " + name).code == 0);
    CHECK(read_text_file(dir / "runs" / (std::string("a_") + name) / file) ==
          read_text_file(dir / "runs" / (std::string("b_") + name) / file));
  }
  const std::string sweep = read_text_file(dir / "runs/a_velocity-sweep/velocity_sweep.csv");
  CHECK(sweep.rfind("alpha,error,reward\n1,0,1\n", 0) == 0);
}

TEST_CASE("usage errors exit with code 2") {
  const auto dir = tftest::temp_dir("cli_usage");
  const auto r = run(dir, "experiment warp-drive");
  CHECK(r.code == 2);
  CHECK(r.output.find("velocity-sweep") != std::string::npos);
  CHECK(r.output.find("ablation") != std::string::npos);
  CHECK(run(dir, "").code == 2);
  CHECK(run(dir, "simulate --frobnicate").code == 2);
  CHECK(run(dir, "--seed notanumber simulate").code == 2);
  CHECK(run(dir, "--version").code == 0);
}

TEST_CASE("runtime errors exit with code 1") {
  const auto dir = tftest::temp_dir("cli_runtime");
  write_text_file(dir / "cfg.json", R"({"sim": {"dt": -1}})");
  const auto r = run(dir, "--config cfg.json simulate");
  CHECK(r.code == 1);
  CHECK(r.output.find("sim.dt") != std::string::npos);
  CHECK(run(dir, "--track missing.csv simulate").code == 1);
}
