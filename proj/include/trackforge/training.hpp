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

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "trackforge/policy.hpp"
#include "trackforge/rollout.hpp"

namespace trackforge {

struct EpisodeMetrics {
  std::uint64_t seed{};
  double episode_return{};
  bool completed{};
  std::size_t steps{};
  double smoothness{};  // mean |d_steer| per step, degrees
  double mean_speed{};  // m/s
  Termination termination = Termination::MaxSteps;
};

EpisodeMetrics episode_metrics(const EpisodeTrace& trace, std::uint64_t seed);

struct EvaluationResult {
  double mean_return{};
  std::vector<EpisodeMetrics> episodes;
  std::vector<EpisodeTrace> traces;  // only filled when requested
};

// Throws ContractViolation on an empty seed list.
EvaluationResult evaluate_policy(const Policy& policy, const TrackModel& track,
                                 const RewardConfig& reward_config, const SimParams& params,
                                 std::span<const std::uint64_t> seeds, bool keep_traces = false);

struct TrainConfig {
  std::size_t population_size = 32;
  double elite_fraction = 0.25;
  double noise_std_init = 0.5;
  double noise_decay = 0.95;
  std::size_t iterations = 40;
  std::size_t episodes_per_candidate = 2;
  std::uint64_t master_seed = 0;
  std::vector<double> lookaheads{0.3, 0.8, 1.5};

  std::size_t elite_count() const;
  std::vector<std::string> validation_errors() const;
  void validate() const;
};

inline constexpr double kNoiseStdFloor = 1e-3;

struct IterationStats {
  std::size_t iteration{};
  double mean_return{};
  double elite_mean_return{};
  double best_so_far{};
  double noise_std{};  // std used to sample this iteration's population
};

struct CemResult {
  std::vector<double> best;
  double best_value{};
  std::vector<double> final_mean;
  std::vector<IterationStats> stats;
  std::size_t evaluations{};
};

// Scores one candidate; `iteration` lets the caller share random numbers
// across a population.
using CemObjective = std::function<double(std::span<const double> candidate, std::size_t iteration)>;
// Sees each sampled population and its scores before the mean update.
using CemObserver = std::function<void(std::size_t iteration, const std::vector<std::vector<double>>& population,
                                       std::span<const double> scores)>;

// Cross-entropy method maximizing `objective` over R^dim, starting from a
// zero mean (or `initial_mean`).
CemResult cem_maximize(std::size_t dim, const CemObjective& objective, const TrainConfig& config,
                       std::vector<double> initial_mean = {}, const CemObserver& observer = {});

struct TrainResult {
  Policy best_policy;
  double best_return{};
  std::vector<IterationStats> stats;
  std::size_t total_episodes{};
};

// Per-iteration rollout seeds shared by every candidate of that iteration.
std::vector<std::uint64_t> iteration_seeds(const TrainConfig& config, std::size_t iteration);

// Evaluation seeds drawn from a stream disjoint from the training streams.
std::vector<std::uint64_t> heldout_seeds(std::uint64_t master_seed, std::size_t n);

TrainResult train_cem(const TrackModel& track, const RewardConfig& reward_config, const SimParams& params,
                      const TrainConfig& config);

}  // namespace trackforge
