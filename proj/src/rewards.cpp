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

#include "trackforge/rewards.hpp"

#include <algorithm>
#include <cmath>

#include "trackforge/errors.hpp"

namespace trackforge {

double velocity_reward(double v_actual, const VelocityRewardParams& params) {
  return std::exp(-params.alpha_v * std::abs(params.v_target - v_actual));
}

double progress_reward_raw(double d_progress, double d_l) {
  if (!(d_l > 0.0)) {
    throw UndefinedReward("progress reward undefined: distance increment is " +
                          std::to_string(d_l) + " (small-denominator problem)");
  }
  return d_progress / d_l;
}

double progress_reward_regularized(double d_progress, double d_l, double epsilon) {
  if (!(epsilon > 0.0)) throw InvalidParameter("epsilon must be positive");
  if (d_l < 0.0) throw ContractViolation("distance increment must be non-negative");
  return d_progress / (d_l + epsilon);
}

double epsilon_adaptive(double mean_dl, double alpha_eps) {
  const double eps = alpha_eps * mean_dl;
  return eps > 0.0 ? eps : kAdaptiveEpsilonFloor;
}

double epsilon_decayed(double epsilon0, double beta, double t) {
  return epsilon0 * std::exp(-beta * t);
}

double steering_penalty(double d_steer, double k) { return -k * std::abs(d_steer); }

double curve_weight_min(double curvature, double gamma) {
  return std::min(gamma * curvature, 1.0);
}

double curve_weight_rational(double curvature, double gamma) {
  return curvature / (curvature + gamma);
}

double gamma_adaptive(double mean_curvature, double alpha_gamma) {
  const double gamma = alpha_gamma * mean_curvature;
  return gamma > 0.0 ? gamma : kAdaptiveGammaFloor;
}

double steering_penalty_weighted(double d_steer, double k, double w_curve, double v_scale) {
  return -k * std::abs(d_steer) * (1.0 - w_curve) * v_scale;
}

double progress_term(const RewardContext& ctx, const ProgressRewardParams& params) {
  switch (params.mode) {
    case ProgressMode::Unregularized:
      return progress_reward_raw(ctx.d_progress, ctx.d_l);
    case ProgressMode::FixedEpsilon:
      return progress_reward_regularized(ctx.d_progress, ctx.d_l, params.epsilon);
    case ProgressMode::AdaptiveEpsilon:
      return progress_reward_regularized(ctx.d_progress, ctx.d_l,
                                         epsilon_adaptive(ctx.mean_dl, params.alpha_eps));
    case ProgressMode::DecayingEpsilon:
      return progress_reward_regularized(
          ctx.d_progress, ctx.d_l,
          epsilon_decayed(params.epsilon0, params.beta, static_cast<double>(ctx.t)));
  }
  return 0.0;
}

double curve_weight(const RewardContext& ctx, const SteeringPenaltyParams& params) {
  if (params.weighting == CurveWeighting::None) return 0.0;
  const double gamma = params.gamma_mode == GammaMode::Fixed
                           ? params.gamma
                           : gamma_adaptive(ctx.mean_curvature, params.alpha_gamma);
  return params.weighting == CurveWeighting::MinForm ? curve_weight_min(ctx.curvature, gamma)
                                                     : curve_weight_rational(ctx.curvature, gamma);
}

double steering_term(const RewardContext& ctx, const SteeringPenaltyParams& params) {
  return steering_penalty_weighted(ctx.d_steer, params.k, curve_weight(ctx, params),
                                   params.v_scale);
}

RewardComponents composite_reward(const RewardContext& ctx, const WeightTriple& w,
                                  const RewardConfig& config) {
  RewardComponents r;
  r.progress = progress_term(ctx, config.progress);
  r.steer = steering_term(ctx, config.steering);
  r.velocity = velocity_reward(ctx.v_actual, config.velocity);
  r.total = w.progress * r.progress + w.steer * r.steer + w.velocity * r.velocity;
  return r;
}

WeightTriple segment_weights(const CompositeWeights& config, SegmentClass segment) {
  return segment == SegmentClass::Curved ? config.curved : config.straight;
}

std::vector<std::string> RewardConfig::validation_errors() const {
  std::vector<std::string> errs;
  const auto need = [&](bool ok, const char* field, const char* what) {
    if (!ok) errs.push_back(std::string(field) + " " + what);
  };
  const auto finite_pos = [](double v) { return std::isfinite(v) && v > 0.0; };
  need(finite_pos(velocity.alpha_v), "velocity.alpha_v", "must be > 0");
  need(finite_pos(velocity.v_target), "velocity.v_target", "must be > 0");
  need(finite_pos(progress.epsilon), "progress.epsilon", "must be > 0");
  need(finite_pos(progress.alpha_eps), "progress.alpha_eps", "must be > 0");
  need(finite_pos(progress.epsilon0), "progress.epsilon0", "must be > 0");
  need(finite_pos(progress.beta), "progress.beta", "must be > 0");
  need(finite_pos(steering.k), "steering.k", "must be > 0");
  need(finite_pos(steering.gamma), "steering.gamma", "must be > 0");
  need(std::isfinite(steering.alpha_gamma) && steering.alpha_gamma > 1.0, "steering.alpha_gamma",
       "must be > 1");
  need(finite_pos(steering.v_scale), "steering.v_scale", "must be > 0");
  need(finite_pos(steering.curvature_window), "steering.curvature_window", "must be > 0");
  need(finite_pos(composite.curvature_threshold), "composite.curvature_threshold", "must be > 0");
  const auto triple_ok = [](const WeightTriple& t) {
    const bool nonneg = t.progress >= 0.0 && t.steer >= 0.0 && t.velocity >= 0.0;
    const bool finite = std::isfinite(t.progress) && std::isfinite(t.steer) && std::isfinite(t.velocity);
    return nonneg && finite && (t.progress > 0.0 || t.steer > 0.0 || t.velocity > 0.0);
  };
  need(triple_ok(composite.straight), "composite.straight",
       "weights must be >= 0 with at least one > 0");
  need(triple_ok(composite.curved), "composite.curved",
       "weights must be >= 0 with at least one > 0");
  return errs;
}

void RewardConfig::validate() const {
  const auto errs = validation_errors();
  if (errs.empty()) return;
  std::string msg = "invalid reward config:";
  for (const auto& e : errs) msg += "\n  " + e;
  throw InvalidParameter(msg);
}

const char* to_string(ProgressMode mode) {
  switch (mode) {
    case ProgressMode::Unregularized: return "unregularized";
    case ProgressMode::FixedEpsilon: return "fixed_epsilon";
    case ProgressMode::AdaptiveEpsilon: return "adaptive_epsilon";
    case ProgressMode::DecayingEpsilon: return "decaying_epsilon";
  }
  return "?";
}

const char* to_string(CurveWeighting weighting) {
  switch (weighting) {
    case CurveWeighting::None: return "none";
    case CurveWeighting::MinForm: return "min";
    case CurveWeighting::RationalForm: return "rational";
  }
  return "?";
}

const char* to_string(GammaMode mode) {
  return mode == GammaMode::Fixed ? "fixed" : "adaptive";
}

}  // namespace trackforge
