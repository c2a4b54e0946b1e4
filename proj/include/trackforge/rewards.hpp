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

#include <string>
#include <vector>

#include "trackforge/track.hpp"

// Reward family for low-speed track following: exponential velocity reward,
// progress per distance travelled (with regularized denominators), steering
// change penalty with curvature weighting, and the weighted composite.
namespace trackforge {

enum class ProgressMode { Unregularized, FixedEpsilon, AdaptiveEpsilon, DecayingEpsilon };
enum class CurveWeighting { None, MinForm, RationalForm };
enum class GammaMode { Fixed, Adaptive };

struct VelocityRewardParams {
  double alpha_v = 3.0;   // steepness of the exponential decay
  double v_target = 1.0;  // m/s
};

struct ProgressRewardParams {
  ProgressMode mode = ProgressMode::FixedEpsilon;
  double epsilon = 0.01;    // m, FixedEpsilon
  double alpha_eps = 0.1;   // AdaptiveEpsilon: epsilon = alpha_eps * mean(dL)
  double epsilon0 = 0.01;   // m, DecayingEpsilon
  double beta = 0.001;      // 1/steps, DecayingEpsilon
};

struct SteeringPenaltyParams {
  double k = 0.01;  // reward units per degree
  CurveWeighting weighting = CurveWeighting::RationalForm;
  GammaMode gamma_mode = GammaMode::Adaptive;
  double gamma = 0.1;        // Fixed
  double alpha_gamma = 2.0;  // Adaptive: gamma = alpha_gamma * mean(curvature), > 1
  double v_scale = 1.0;
  // Arc-length window (m) for the mean curvature feeding adaptive gamma.
  double curvature_window = 2.0;
};

struct WeightTriple {
  double progress{};
  double steer{};
  double velocity{};
  bool operator==(const WeightTriple&) const = default;
};

struct CompositeWeights {
  WeightTriple straight{1.0, 0.1, 1.0};
  WeightTriple curved{1.0, 0.5, 0.3};
  double curvature_threshold = 0.05;  // 1/m
};

struct RewardConfig {
  VelocityRewardParams velocity;
  ProgressRewardParams progress;
  SteeringPenaltyParams steering;
  CompositeWeights composite;

  // One message per invalid field; empty when valid.
  std::vector<std::string> validation_errors() const;
  // Throws InvalidParameter listing every invalid field.
  void validate() const;
};

// Everything the reward terms consume for one step.
struct RewardContext {
  double d_progress{};      // lap fraction, may be negative
  double d_l{};             // m, >= 0
  double d_steer{};         // degrees, signed
  double v_actual{};        // m/s
  double curvature{};       // 1/m
  double mean_dl{};         // m
  double mean_curvature{};  // 1/m
  long long t{};            // step index
};

struct RewardComponents {
  double total{};
  double progress{};
  double steer{};
  double velocity{};
};

inline constexpr double kAdaptiveEpsilonFloor = 1e-9;
inline constexpr double kAdaptiveGammaFloor = 1e-6;

double velocity_reward(double v_actual, const VelocityRewardParams& params);

// Throws UndefinedReward when d_l <= 0.
double progress_reward_raw(double d_progress, double d_l);
// Throws InvalidParameter when epsilon <= 0.
double progress_reward_regularized(double d_progress, double d_l, double epsilon);
double epsilon_adaptive(double mean_dl, double alpha_eps);
double epsilon_decayed(double epsilon0, double beta, double t);

double steering_penalty(double d_steer, double k);
double curve_weight_min(double curvature, double gamma);
double curve_weight_rational(double curvature, double gamma);
double gamma_adaptive(double mean_curvature, double alpha_gamma);
double steering_penalty_weighted(double d_steer, double k, double w_curve, double v_scale);

// Progress term under the configured regularization mode.
double progress_term(const RewardContext& ctx, const ProgressRewardParams& params);
// Curvature weight under the configured weighting form and gamma mode.
double curve_weight(const RewardContext& ctx, const SteeringPenaltyParams& params);
double steering_term(const RewardContext& ctx, const SteeringPenaltyParams& params);

RewardComponents composite_reward(const RewardContext& ctx, const WeightTriple& weights,
                                  const RewardConfig& config);

WeightTriple segment_weights(const CompositeWeights& config, SegmentClass segment);

const char* to_string(ProgressMode mode);
const char* to_string(CurveWeighting weighting);
const char* to_string(GammaMode mode);

}  // namespace trackforge
