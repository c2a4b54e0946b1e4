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

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "trackforge/dynamics.hpp"
#include "trackforge/experiments.hpp"
#include "trackforge/policy.hpp"
#include "trackforge/rewards.hpp"
#include "trackforge/training.hpp"

namespace trackforge {

struct AblationConfig {
  // progress-regularization | steering-weighting | steering-weight
  std::string preset = "progress-regularization";
  std::size_t eval_episodes = 10;
  std::vector<std::uint64_t> train_seeds{0};
  double spike_factor = 10.0;
};

// Parameters of the synthetic comparison experiments.
struct ExperimentConfig {
  std::vector<double> velocity_alphas{1.0, 3.0, 5.0};
  std::vector<double> velocity_errors;  // empty = 0..1 in steps of 0.05
  double scatter_alpha = 3.0;
  std::size_t scatter_samples = 1000;
  double progress_epsilon = 0.01;
  SyntheticProgressTrace progress_trace;
  double steering_k = 0.01;
  std::size_t steering_steps = 500;
  WeightedSteeringSetup weighted;
  AblationConfig ablation;

  std::vector<double> error_grid() const;
};

struct RunConfig {
  std::string track = "data/tracks/oval.csv";
  double half_width = 0.6;
  SimParams sim;
  RewardConfig reward;
  TrainConfig train;  // master_seed is taken from `seed`
  ExperimentConfig experiments;
  std::string output_dir = "runs";
  std::uint64_t seed = 0;

  std::vector<std::string> validation_errors() const;
  void validate() const;
};

// Canonical JSON (2-space indent, fixed key order, trailing newline).
std::string to_json(const RunConfig& config);
// Rejects unknown keys; missing keys keep their defaults. Accepts a run
// manifest as well, reading its embedded `config`. Errors name every bad field.
RunConfig parse_run_config(std::string_view text);
RunConfig load_run_config(const std::filesystem::path& path);

// Same document with a `//` comment above every field.
std::string commented_config_template(const RunConfig& config);

std::string reward_config_to_json(const RewardConfig& config);
RewardConfig parse_reward_config(std::string_view text);

struct PolicyCheckpoint {
  Policy policy;
  ActionBounds bounds;
  std::uint64_t master_seed{};
};

std::string to_json(const PolicyCheckpoint& checkpoint);
PolicyCheckpoint parse_policy_checkpoint(std::string_view text);
PolicyCheckpoint load_policy_checkpoint(const std::filesystem::path& path);

// "builtin:oval" and "builtin:slow-corner" name the bundled shapes; anything
// else is a track CSV path.
TrackModel load_track_spec(const std::string& spec, double half_width);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

const char* library_version();

}  // namespace trackforge
