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

#include <boost/multiprecision/cpp_dec_float.hpp>
#include <cmath>
#include <random>

#include "doctest.h"
#include "trackforge/errors.hpp"
#include "trackforge/rewards.hpp"

using namespace trackforge;
using doctest::Approx;
using Big = boost::multiprecision::cpp_dec_float_50;

namespace {

double big_exp(double x) { return static_cast<double>(boost::multiprecision::exp(Big(x))); }

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

RewardConfig plain_config() {
  RewardConfig c;
  c.steering.weighting = CurveWeighting::None;
  return c;
}

}  // namespace

TEST_CASE("velocity_reward examples") {
  VelocityRewardParams p;
  p.alpha_v = 3.0;
  p.v_target = 1.0;
  CHECK(velocity_reward(1.0, p) == 1.0);
  CHECK(rel(velocity_reward(0.5, p), big_exp(-1.5)) < 1e-15);
  CHECK(velocity_reward(0.5, p) == Approx(0.223130).epsilon(1e-6));
  CHECK(velocity_reward(0.0, p) == Approx(0.049787).epsilon(1e-5));
  CHECK(velocity_reward(1.5, p) == velocity_reward(0.5, p));
}

TEST_CASE("property: velocity_reward decreases in error and in alpha") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  for (int i = 0; i < 1000; ++i) {
    const double e1 = u(rng), e2 = u(rng);
    if (e1 == e2) continue;
    VelocityRewardParams p{3.0, 1.0};
    const double r1 = velocity_reward(1.0 - e1, p), r2 = velocity_reward(1.0 - e2, p);
    CHECK(r1 > 0.0);
    CHECK(r1 <= 1.0);
    CHECK((e1 < e2 ? r1 > r2 : r1 < r2));
  }
  double prev = 2.0;
  for (double a : {0.5, 1.0, 3.0, 5.0, 9.0}) {
    const double r = velocity_reward(0.5, {a, 1.0});
    CHECK(r < prev);
    prev = r;
  }
}

TEST_CASE("progress_reward_raw") {
  CHECK(progress_reward_raw(0.0, 0.1) == 0.0);
  CHECK(progress_reward_raw(0.001, 0.05) == Approx(0.02).epsilon(1e-15));
  CHECK_THROWS_AS(progress_reward_raw(0.001, 0.0), UndefinedReward);
  CHECK_THROWS_AS(progress_reward_raw(0.001, -1.0), UndefinedReward);
}

TEST_CASE("progress_reward_regularized") {
  CHECK(progress_reward_regularized(0.1, 0.0, 0.01) == Approx(10.0).epsilon(1e-15));
  CHECK(progress_reward_regularized(0.0, 0.3, 0.7) == 0.0);
  CHECK(progress_reward_regularized(0.001, 0.05, 0.001) == Approx(0.019608).epsilon(1e-5));
  CHECK_THROWS_AS(progress_reward_regularized(0.1, 0.1, 0.0), InvalidParameter);
  CHECK_THROWS_AS(progress_reward_regularized(0.1, 0.1, -1.0), InvalidParameter);
}

TEST_CASE("property: regularized progress is bounded and converges to the raw form") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> dp(-0.01, 0.01), dl(0.0, 0.2), eps(1e-6, 0.1);
  for (int i = 0; i < 10000; ++i) {
    const double p = dp(rng), l = dl(rng), e = eps(rng);
    const double r = progress_reward_regularized(p, l, e);
    CHECK(std::isfinite(r));
    CHECK(std::abs(r) <= std::abs(p) / e * (1 + 1e-15));
  }
  for (int i = 0; i < 1000; ++i) {
    const double p = std::abs(dp(rng)), l = 0.01 + dl(rng);
    const double e = 1e-6;
    CHECK(std::abs(progress_reward_regularized(p, l, e) - progress_reward_raw(p, l)) <= p * e / (l * l));
  }
}

TEST_CASE("epsilon_adaptive") {
  CHECK(epsilon_adaptive(0.06, 0.1) == Approx(0.006).epsilon(1e-15));
  CHECK(epsilon_adaptive(0.0, 0.1) == 1e-9);
  CHECK(epsilon_adaptive(0.05, 1.0) == 0.05);
}

TEST_CASE("epsilon_decayed") {
  CHECK(epsilon_decayed(0.01, 0.001, 0.0) == 0.01);
  CHECK(rel(epsilon_decayed(0.01, 0.001, 1000.0), 0.01 * big_exp(-1.0)) < 1e-15);
  CHECK(epsilon_decayed(0.01, 0.001, 1000.0) == Approx(0.0036788).epsilon(1e-4));
  CHECK(std::abs(epsilon_decayed(0.01, 0.001, 693.0) - 0.005) / 0.005 < 1e-3);
}

TEST_CASE("property: decayed epsilon is strictly decreasing and geometric") {
  for (int t = 0; t < 10000; ++t) {
    const double a = epsilon_decayed(0.01, 0.001, t);
    const double b = epsilon_decayed(0.01, 0.001, t + 1);
    const double c = epsilon_decayed(0.01, 0.001, t + 2);
    CHECK(b < a);
    CHECK(rel(a * c, b * b) <= 1e-12);
  }
}

TEST_CASE("steering_penalty") {
  CHECK(steering_penalty(0.0, 0.01) == 0.0);
  CHECK(steering_penalty(10.0, 0.01) == Approx(-0.1).epsilon(1e-15));
  CHECK(steering_penalty(10.0, 0.01) == steering_penalty(-10.0, 0.01));
}

TEST_CASE("curve weights") {
  CHECK(curve_weight_min(0.0, 5.0) == 0.0);
  CHECK(curve_weight_min(0.1, 5.0) == Approx(0.5).epsilon(1e-15));
  CHECK(curve_weight_min(0.5, 5.0) == 1.0);
  CHECK(curve_weight_rational(0.0, 0.1) == 0.0);
  CHECK(curve_weight_rational(0.1, 0.1) == 0.5);
  CHECK(curve_weight_rational(0.2, 0.1) == Approx(2.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("property: curve weights are monotone and bounded") {
  for (double gamma : {0.01, 0.1, 1.0, 7.0}) {
    double pm = -1.0, pr = -1.0;
    for (int i = 0; i <= 2000; ++i) {
      const double k = 0.005 * i;
      const double m = curve_weight_min(k, gamma);
      const double r = curve_weight_rational(k, gamma);
      CHECK(m >= pm);
      CHECK(r >= pr);
      CHECK(m <= 1.0);
      CHECK(r < 1.0);
      CHECK(m >= 0.0);
      CHECK(r >= 0.0);
      pm = m;
      pr = r;
    }
    CHECK(curve_weight_min(1.0 / (2.0 * gamma), gamma) == Approx(0.5).epsilon(1e-15));
    CHECK(curve_weight_rational(gamma, gamma) == 0.5);
  }
}

TEST_CASE("gamma_adaptive") {
  CHECK(gamma_adaptive(0.1, 2.0) == Approx(0.2).epsilon(1e-15));
  CHECK(gamma_adaptive(0.0, 2.0) == 1e-6);
  const double k = 0.3;
  CHECK(curve_weight_rational(k, gamma_adaptive(k, 1.0 + 1e-9)) == Approx(0.5).epsilon(1e-8));
}

TEST_CASE("steering_penalty_weighted") {
  CHECK(steering_penalty_weighted(25.0, 0.01, 1.0, 1.0) == 0.0);
  for (double d : {-17.0, 0.0, 3.5, 29.0}) {
    CHECK(steering_penalty_weighted(d, 0.02, 0.0, 1.0) == steering_penalty(d, 0.02));
  }
  CHECK(steering_penalty_weighted(20.0, 0.01, 0.5, 1.0) == Approx(-0.1).epsilon(1e-15));
}

TEST_CASE("property: weighted penalty never exceeds the unweighted one") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(-60.0, 60.0), w(0.0, 1.0), k(1e-3, 1.0);
  for (int i = 0; i < 10000; ++i) {
    const double dd = d(rng), ww = w(rng), kk = k(rng);
    const double weighted = std::abs(steering_penalty_weighted(dd, kk, ww, 1.0));
    const double plain = std::abs(steering_penalty(dd, kk));
    CHECK(weighted <= plain);
    if (ww > 0.0 && dd != 0.0) CHECK(weighted < plain);
  }
}

TEST_CASE("composite_reward examples") {
  RewardConfig c = plain_config();
  RewardContext ctx;
  ctx.v_actual = c.velocity.v_target;
  ctx.d_l = 0.05;
  CHECK(composite_reward(ctx, {0.0, 0.0, 1.0}, c).total == 1.0);
  CHECK(composite_reward(ctx, {1.0, 1.0, 1.0}, c).total == 1.0);

  // Components (2.0, -0.1, 0.5) with weights (0.5, 0.2, 0.3).
  c.progress.mode = ProgressMode::Unregularized;
  c.steering.k = 0.01;
  c.velocity.alpha_v = std::log(2.0);
  c.velocity.v_target = 1.0;
  ctx.d_progress = 0.1;
  ctx.d_l = 0.05;
  ctx.d_steer = -10.0;
  ctx.v_actual = 0.0;
  const auto r = composite_reward(ctx, {0.5, 0.2, 0.3}, c);
  CHECK(r.progress == Approx(2.0).epsilon(1e-15));
  CHECK(r.steer == Approx(-0.1).epsilon(1e-15));
  CHECK(r.velocity == Approx(0.5).epsilon(1e-15));
  CHECK(r.total == Approx(1.13).epsilon(1e-14));

  ctx.d_l = 0.0;
  CHECK_THROWS_AS(composite_reward(ctx, {1, 1, 1}, c), UndefinedReward);
}

TEST_CASE("property: composite is the weighted sum of standalone components") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const ProgressMode modes[] = {ProgressMode::Unregularized, ProgressMode::FixedEpsilon,
                                ProgressMode::AdaptiveEpsilon, ProgressMode::DecayingEpsilon};
  const CurveWeighting forms[] = {CurveWeighting::None, CurveWeighting::MinForm, CurveWeighting::RationalForm};
  for (int i = 0; i < 2000; ++i) {
    RewardConfig c;
    c.progress.mode = modes[i % 4];
    c.steering.weighting = forms[i % 3];
    c.steering.gamma_mode = (i / 3) % 2 == 0 ? GammaMode::Fixed : GammaMode::Adaptive;
    c.steering.v_scale = 0.5 + u(rng);
    RewardContext ctx;
    ctx.d_progress = 0.01 * (u(rng) - 0.3);
    ctx.d_l = 1e-4 + 0.1 * u(rng);
    ctx.d_steer = 60.0 * (u(rng) - 0.5);
    ctx.v_actual = u(rng);
    ctx.curvature = 3.0 * u(rng);
    ctx.mean_dl = 0.1 * u(rng);
    ctx.mean_curvature = u(rng);
    ctx.t = static_cast<long long>(1000 * u(rng));
    const WeightTriple w{u(rng), u(rng), u(rng)};
    const auto r = composite_reward(ctx, w, c);

    double progress = 0.0;
    switch (c.progress.mode) {
      case ProgressMode::Unregularized: progress = progress_reward_raw(ctx.d_progress, ctx.d_l); break;
      case ProgressMode::FixedEpsilon:
        progress = progress_reward_regularized(ctx.d_progress, ctx.d_l, c.progress.epsilon);
        break;
      case ProgressMode::AdaptiveEpsilon:
        progress = progress_reward_regularized(ctx.d_progress, ctx.d_l,
                                               epsilon_adaptive(ctx.mean_dl, c.progress.alpha_eps));
        break;
      case ProgressMode::DecayingEpsilon:
        progress = progress_reward_regularized(
            ctx.d_progress, ctx.d_l, epsilon_decayed(c.progress.epsilon0, c.progress.beta, double(ctx.t)));
        break;
    }
    const double gamma = c.steering.gamma_mode == GammaMode::Fixed
                             ? c.steering.gamma
                             : gamma_adaptive(ctx.mean_curvature, c.steering.alpha_gamma);
    double wc = 0.0;
    if (c.steering.weighting == CurveWeighting::MinForm) wc = curve_weight_min(ctx.curvature, gamma);
    if (c.steering.weighting == CurveWeighting::RationalForm) wc = curve_weight_rational(ctx.curvature, gamma);
    const double steer = steering_penalty_weighted(ctx.d_steer, c.steering.k, wc, c.steering.v_scale);
    const double velocity = velocity_reward(ctx.v_actual, c.velocity);

    CHECK(r.progress == progress);
    CHECK(r.steer == steer);
    CHECK(r.velocity == velocity);
    const double sum = w.progress * progress + w.steer * steer + w.velocity * velocity;
    CHECK(std::abs(r.total - sum) <= 1e-12 * std::max(1.0, std::abs(sum)));

    const WeightTriple doubled{2 * w.progress, w.steer, w.velocity};
    const auto r2 = composite_reward(ctx, doubled, c);
    CHECK(std::abs((r2.total - r.total) - w.progress * progress) <= 1e-12 * std::max(1.0, std::abs(r2.total)));
  }
}

TEST_CASE("segment_weights") {
  const CompositeWeights d;
  CHECK(segment_weights(d, SegmentClass::Straight) == WeightTriple{1.0, 0.1, 1.0});
  CHECK(segment_weights(d, SegmentClass::Curved) == WeightTriple{1.0, 0.5, 0.3});
  CompositeWeights same;
  same.curved = same.straight;
  CHECK(segment_weights(same, SegmentClass::Curved) == segment_weights(same, SegmentClass::Straight));
}

TEST_CASE("RewardConfig validation") {
  CHECK(RewardConfig{}.validation_errors().empty());
  RewardConfig c;
  c.velocity.alpha_v = 0.0;
  c.steering.alpha_gamma = 1.0;
  c.composite.curved = {0.0, 0.0, 0.0};
  const auto errs = c.validation_errors();
  REQUIRE(errs.size() == 3);
  CHECK(errs[0].find("velocity.alpha_v") != std::string::npos);
  CHECK(errs[1].find("steering.alpha_gamma") != std::string::npos);
  CHECK(errs[2].find("composite.curved") != std::string::npos);
  CHECK_THROWS_AS(c.validate(), InvalidParameter);
}

TEST_CASE("enum names") {
  CHECK(std::string(to_string(ProgressMode::AdaptiveEpsilon)) == "adaptive_epsilon");
  CHECK(std::string(to_string(CurveWeighting::MinForm)) == "min");
  CHECK(std::string(to_string(GammaMode::Adaptive)) == "adaptive");
}
