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

#include <cmath>
#include <cstdlib>

#include "doctest.h"
#include "test_support.hpp"
#include "trackforge/errors.hpp"
#include "trackforge/training.hpp"

using namespace trackforge;
using doctest::Approx;

namespace {

TrainConfig small_config() {
  TrainConfig c;
  c.population_size = 8;
  c.iterations = 4;
  c.episodes_per_candidate = 2;
  c.master_seed = 42;
  return c;
}

SimParams short_sim() {
  SimParams p;
  p.max_steps = 150;
  p.random_start = true;
  return p;
}

bool same_stats(const std::vector<IterationStats>& a, const std::vector<IterationStats>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].mean_return != b[i].mean_return || a[i].elite_mean_return != b[i].elite_mean_return ||
        a[i].best_so_far != b[i].best_so_far || a[i].noise_std != b[i].noise_std) {
      return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("train_cem: one iteration of four candidates runs exactly 4 x episodes rollouts") {
  const TrackModel t(shapes::oval(), 0.6);
  TrainConfig c = small_config();
  c.iterations = 1;
  c.population_size = 4;
  c.episodes_per_candidate = 3;
  const auto r = train_cem(t, RewardConfig{}, short_sim(), c);
  CHECK(r.total_episodes == 12);
  CHECK(r.stats.size() == 1);
}

TEST_CASE("train_cem: episode count is iterations x population x episodes") {
  const TrackModel t(shapes::oval(), 0.6);
  const auto c = small_config();
  const auto r = train_cem(t, RewardConfig{}, short_sim(), c);
  CHECK(r.total_episodes == c.iterations * c.population_size * c.episodes_per_candidate);
}

TEST_CASE("train_cem: same master seed, same result; thread count does not matter") {
  const TrackModel t(shapes::oval(), 0.6);
  const auto c = small_config();
  setenv("TRACKFORGE_THREADS", "1", 1);
  const auto a = train_cem(t, RewardConfig{}, short_sim(), c);
  setenv("TRACKFORGE_THREADS", "4", 1);
  const auto b = train_cem(t, RewardConfig{}, short_sim(), c);
  unsetenv("TRACKFORGE_THREADS");
  CHECK(same_stats(a.stats, b.stats));
  CHECK(a.best_policy.weights == b.best_policy.weights);
  CHECK(a.best_return == b.best_return);
  TrainConfig other = c;
  other.master_seed = 43;
  CHECK_FALSE(same_stats(a.stats, train_cem(t, RewardConfig{}, short_sim(), other).stats));
}

TEST_CASE("train_cem: statistics invariants") {
  const TrackModel t(shapes::oval(), 0.6);
  TrainConfig c = small_config();
  c.iterations = 12;
  c.noise_decay = 0.5;
  const auto r = train_cem(t, RewardConfig{}, short_sim(), c);
  for (std::size_t i = 0; i < r.stats.size(); ++i) {
    CHECK(r.stats[i].iteration == i);
    CHECK(r.stats[i].noise_std >= kNoiseStdFloor);
    CHECK(r.stats[i].elite_mean_return >= r.stats[i].mean_return);
    CHECK(r.stats[i].best_so_far >= r.stats[i].elite_mean_return);
    if (i > 0) {
      CHECK(r.stats[i].best_so_far >= r.stats[i - 1].best_so_far);
      CHECK(r.stats[i].noise_std <= r.stats[i - 1].noise_std);
    }
  }
  CHECK(r.stats.back().noise_std == kNoiseStdFloor);
  CHECK(r.best_return == r.stats.back().best_so_far);
}

TEST_CASE("train_cem: best policy reproduces its recorded return") {
  const TrackModel t(shapes::oval(), 0.6);
  const auto c = small_config();
  const auto sim = short_sim();
  std::size_t best_iteration = 0;
  const auto r = train_cem(t, RewardConfig{}, sim, c);
  for (std::size_t i = 0; i < r.stats.size(); ++i) {
    if (r.stats[i].best_so_far == r.best_return) {
      best_iteration = i;
      break;
    }
  }
  const auto seeds = iteration_seeds(c, best_iteration);
  CHECK(evaluate_policy(r.best_policy, t, RewardConfig{}, sim, seeds).mean_return == Approx(r.best_return));
}

TEST_CASE("cem_maximize: quadratic objective converges to its optimum") {
  const std::vector<double> opt{1.5, -2.0, 0.25, 3.0, -0.75};
  const auto f = [&](std::span<const double> x, std::size_t) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s -= (x[i] - opt[i]) * (x[i] - opt[i]);
    return s;
  };
  // The optimum is the maximum over a brute-force grid of perturbations.
  std::vector<double> probe = opt;
  const double at_opt = f(probe, 0);
  for (std::size_t d = 0; d < opt.size(); ++d) {
    for (double delta = -1.0; delta <= 1.0; delta += 0.125) {
      probe = opt;
      probe[d] += delta;
      CHECK(f(probe, 0) <= at_opt);
    }
  }
  TrainConfig c;
  c.population_size = 64;
  c.iterations = 50;
  c.elite_fraction = 0.25;
  c.noise_std_init = 2.0;
  c.noise_decay = 0.9;
  c.master_seed = 9;
  const auto r = cem_maximize(opt.size(), f, c);
  for (std::size_t i = 0; i < opt.size(); ++i) CHECK(std::abs(r.final_mean[i] - opt[i]) < 1e-2);
  CHECK(r.evaluations == 64 * 50);
}

TEST_CASE("cem_maximize: elite fraction 1 refits to the population mean") {
  TrainConfig c;
  c.population_size = 10;
  c.iterations = 1;
  c.elite_fraction = 1.0;
  std::vector<double> pop_mean(3, 0.0);
  const auto r = cem_maximize(
      3, [](std::span<const double> x, std::size_t) { return x[0] - x[1] * x[2]; }, c, {0.5, -1.0, 2.0},
      [&](std::size_t, const std::vector<std::vector<double>>& pop, std::span<const double>) {
        for (const auto& cand : pop) {
          for (std::size_t d = 0; d < 3; ++d) pop_mean[d] += cand[d] / 10.0;
        }
      });
  for (std::size_t d = 0; d < 3; ++d) CHECK(r.final_mean[d] == Approx(pop_mean[d]).epsilon(1e-12));
}

TEST_CASE("cem_maximize: NaN scores never become the best candidate") {
  TrainConfig c;
  c.population_size = 8;
  c.iterations = 3;
  const auto r = cem_maximize(
      2, [](std::span<const double> x, std::size_t) { return x[0] > 0 ? std::nan("") : x[0]; }, c);
  CHECK(std::isfinite(r.best_value));
  CHECK(r.best[0] <= 0.0);
}

TEST_CASE("evaluate_policy") {
  const TrackModel t(shapes::oval(), 0.6);
  SimParams zero;
  zero.max_steps = 0;
  const std::vector<std::uint64_t> one{5};
  const auto e = evaluate_policy(Policy::zeros({0.3}), t, RewardConfig{}, zero, one);
  CHECK(e.mean_return == 0.0);
  CHECK(e.episodes[0].steps == 0);
  CHECK_THROWS_AS(evaluate_policy(Policy::zeros({0.3}), t, RewardConfig{}, zero, {}), ContractViolation);

  const std::vector<std::uint64_t> seeds{1, 2, 3};
  SimParams rs;
  rs.random_start = true;
  Policy p = Policy::zeros({0.3});
  p.weights = {0.1, 0.2, 0.3, 0.4, 0.5, -1.0, -2.0, 0.0, 1.0, 0.0};
  const auto a = evaluate_policy(p, t, RewardConfig{}, rs, seeds, true);
  const auto b = evaluate_policy(p, t, RewardConfig{}, rs, seeds, true);
  CHECK(a.mean_return == b.mean_return);
  REQUIRE(a.traces.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(a.episodes[i].episode_return == b.episodes[i].episode_return);
    CHECK(a.episodes[i].seed == seeds[i]);
    CHECK(a.episodes[i].episode_return == Approx(a.traces[i].total_reward()).epsilon(1e-15));
  }
}

TEST_CASE("evaluate_policy: full-speed straight run follows the first-order speed profile") {
  // A long straight so the run never reaches a corner.
  std::vector<Waypoint> pts;
  for (int i = 0; i <= 40; ++i) pts.push_back({static_cast<double>(i), 0.0});
  for (int i = 40; i >= 0; --i) pts.push_back({static_cast<double>(i), 10.0});
  const TrackModel t(pts, 1.0);
  SimParams sim;
  sim.max_steps = 300;
  Policy p = Policy::zeros({});
  p.weights[p.feature_dim() - 1] = 40.0;  // sigmoid saturates at full speed
  const std::vector<std::uint64_t> seeds{0};
  const auto e = evaluate_policy(p, t, RewardConfig{}, sim, seeds, true);
  REQUIRE(e.episodes[0].termination == Termination::MaxSteps);
  const double target = sim.bounds.speed_min + (sim.bounds.speed_max - sim.bounds.speed_min) / (1.0 + std::exp(-40.0));
  double sum = 0.0;
  for (std::size_t k = 1; k <= sim.max_steps; ++k) {
    sum += std::min(target, static_cast<double>(k) * sim.max_accel * sim.dt);
  }
  CHECK(e.episodes[0].mean_speed == Approx(sum / static_cast<double>(sim.max_steps)).epsilon(1e-9));
  CHECK(e.episodes[0].mean_speed > 0.97 * sim.bounds.speed_max);
  CHECK(e.episodes[0].smoothness == 0.0);
}

TEST_CASE("TrainConfig validation and elite count") {
  TrainConfig c;
  CHECK(c.validation_errors().empty());
  CHECK(c.elite_count() == 8);
  c.population_size = 3;
  c.iterations = 0;
  c.noise_decay = 1.5;
  CHECK(c.validation_errors().size() == 3);
  TrainConfig tiny;
  tiny.population_size = 4;
  tiny.elite_fraction = 0.1;
  CHECK_FALSE(tiny.validation_errors().empty());
}

TEST_CASE("seed streams are disjoint") {
  TrainConfig c;
  c.episodes_per_candidate = 4;
  const auto a = iteration_seeds(c, 0);
  const auto b = iteration_seeds(c, 1);
  const auto h = heldout_seeds(c.master_seed, 8);
  CHECK(h.size() == 8);
  for (auto s : a) {
    CHECK(std::find(b.begin(), b.end(), s) == b.end());
    CHECK(std::find(h.begin(), h.end(), s) == h.end());
  }
  CHECK(heldout_seeds(1, 3) != heldout_seeds(2, 3));
}
