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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "trackforge/rewards.hpp"
#include "trackforge/rollout.hpp"
#include "trackforge/training.hpp"

namespace trackforge {

// Plot-ready numeric table. `labels` optionally prefixes each row with a
// string column named `label_column`.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::string label_column;
  std::vector<std::string> labels;
  std::vector<std::string> footer;  // written as trailing `# ` lines

  std::size_t column(std::string_view name) const;
  std::string to_csv() const;
  void save(const std::filesystem::path& path) const;
};

// Reward decay curves: one row per (alpha, error) pair, v_target = 1 m/s.
Table sweep_velocity_reward(std::span<const double> alphas, std::span<const double> errors);

// Uniform v_actual in [0, 1] m/s against v_target = 1 m/s.
Table scatter_velocity_reward(double alpha, std::size_t n, std::uint64_t seed);

// Synthetic step sequence with a sinusoidal distance increment that dips to
// `dl_floor` once per period:
//   dL_t = floor + (peak - floor) * (1 - cos(2 pi t / period)) / 2 * (1 + jitter * u_t)
// with u_t ~ U[-1, 1] from `seed`, and a constant progress increment.
struct SyntheticProgressTrace {
  std::size_t steps = 200;
  std::size_t period = 50;
  double dl_peak = 0.06;
  double dl_floor = 1e-6;
  double d_progress = 0.001;
  double jitter = 0.1;
  std::uint64_t seed = 7;
};

// Columns t, dl, dprogress, r_raw, r_regularized. r_raw is NaN where dL = 0.
Table compare_progress_rewards(const SyntheticProgressTrace& trace, double epsilon);

struct SteeringProfiles {
  double smooth_amplitude = 2.0;  // degrees, dtheta_t = A sin(2 pi t / period)
  std::size_t smooth_period = 50;
  double abrupt_range = 25.0;     // degrees, dtheta_t ~ U[-range, range]
};

// Steering-change sequence of the abrupt generator.
std::vector<double> abrupt_steering_profile(std::size_t n, std::uint64_t seed, double range = 25.0);

struct SteeringComparison {
  Table table;  // t, dtheta_smooth, r_smooth, dtheta_abrupt, r_abrupt
  double mean_abs_smooth{};
  double mean_abs_abrupt{};
};

SteeringComparison compare_steering_penalties(double k, std::size_t n_steps, std::uint64_t seed,
                                              const SteeringProfiles& profiles = {});

// Curvature alternates straight (0) and arc blocks of `block_length` steps.
struct WeightedSteeringSetup {
  double k = 0.01;
  double gamma = 0.1;
  CurveWeighting form = CurveWeighting::RationalForm;
  double arc_curvature = 0.2;
  std::size_t block_length = 25;
  std::size_t steps = 200;
  std::uint64_t seed = 11;
  double abrupt_range = 25.0;
};

// Columns t, curvature, w_curve, r_unweighted, r_weighted.
Table compare_weighted_steering(const WeightedSteeringSetup& setup);

struct AblationVariant {
  std::string name;
  RewardConfig reward;
};

struct AblationSummary {
  std::string variant;
  std::size_t episodes{};
  std::size_t steps{};
  double completion_rate{};
  double mean_lap_time{};  // s, completed laps only; NaN when none completed
  double mean_speed{};     // m/s, over all steps
  double smoothness{};     // mean |d_steer| per step, degrees
  double reward_variance{};
  double spike_fraction{};  // steps with |r_progress| > factor * trace median
  double train_best_return{};
  bool failed{};
  std::string error;
};

// Statistics of a set of evaluation traces; the only code path used to build
// summaries, so persisted traces reproduce them exactly.
AblationSummary summarize_traces(const std::string& variant, std::span<const EpisodeTrace> traces, double dt,
                                 double spike_factor);

struct AblationSetup {
  std::vector<AblationVariant> variants;
  SimParams sim;
  TrainConfig train;
  std::vector<std::uint64_t> train_seeds;  // empty = {train.master_seed}
  std::vector<std::uint64_t> eval_seeds;
  double spike_factor = 10.0;
};

struct AblationRun {
  std::string variant;
  std::uint64_t train_seed{};
  TrainResult training;
  std::vector<EpisodeTrace> traces;
  AblationSummary summary;
};

struct AblationResult {
  std::vector<AblationSummary> summaries;  // pooled over train seeds, one per variant
  std::vector<AblationRun> runs;           // one per (variant, train seed)

  Table summary_table() const;
  Table per_seed_table() const;
  // Direction and effect size of each variant against the first one.
  std::string report() const;
};

inline constexpr const char* kAblationPresets[] = {"progress-regularization", "steering-weighting",
                                                   "steering-weight"};

// Variant pairs derived from `base`:
//   progress-regularization  unregularized vs regularized progress; the
//                            velocity weights are zeroed so progress dominates
//   steering-weighting       unweighted vs curvature-weighted steering penalty
//   steering-weight          curved-segment w_steer = 0 vs w_steer = 0.5
std::vector<AblationVariant> ablation_preset_variants(std::string_view preset, const RewardConfig& base);

// Trains and evaluates every variant with the same budget and seeds. When
// `output_dir` is set, every evaluation trace is written there as
// `<variant>_seed<train>_eval<k>.csv`.
AblationResult run_ablation(const TrackModel& track, const AblationSetup& setup,
                            const std::optional<std::filesystem::path>& output_dir = std::nullopt);

}  // namespace trackforge
