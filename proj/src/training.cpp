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

#include "trackforge/training.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "trackforge/errors.hpp"
#include "trackforge/util.hpp"

namespace trackforge {

EpisodeMetrics episode_metrics(const EpisodeTrace& trace, std::uint64_t seed) {
  EpisodeMetrics m;
  m.seed = seed;
  m.steps = trace.steps.size();
  m.termination = trace.termination;
  m.completed = trace.termination == Termination::Completed;
  double abs_steer = 0.0;
  double speed = 0.0;
  for (const auto& r : trace.steps) {
    m.episode_return += r.reward.total;
    abs_steer += std::abs(r.d_steer);
    speed += r.state.speed;
  }
  if (m.steps > 0) {
    m.smoothness = abs_steer / static_cast<double>(m.steps);
    m.mean_speed = speed / static_cast<double>(m.steps);
  }
  return m;
}

EvaluationResult evaluate_policy(const Policy& policy, const TrackModel& track,
                                 const RewardConfig& reward_config, const SimParams& params,
                                 std::span<const std::uint64_t> seeds, bool keep_traces) {
  if (seeds.empty()) throw ContractViolation("evaluate_policy: no seeds");
  EvaluationResult result;
  result.episodes.resize(seeds.size());
  if (keep_traces) result.traces.resize(seeds.size());
  parallel_for(seeds.size(), [&](std::size_t i) {
    EpisodeTrace trace = rollout(policy, track, reward_config, params, seeds[i]);
    result.episodes[i] = episode_metrics(trace, seeds[i]);
    if (keep_traces) result.traces[i] = std::move(trace);
  });
  double sum = 0.0;
  for (const auto& e : result.episodes) sum += e.episode_return;
  result.mean_return = sum / static_cast<double>(seeds.size());
  return result;
}

std::size_t TrainConfig::elite_count() const {
  const auto n = static_cast<std::size_t>(std::floor(elite_fraction * static_cast<double>(population_size) + 1e-9));
  return std::clamp<std::size_t>(n, 1, population_size);
}

std::vector<std::string> TrainConfig::validation_errors() const {
  std::vector<std::string> errs;
  if (population_size < 4) errs.emplace_back("train.population_size must be >= 4");
  if (!(elite_fraction > 0.0 && elite_fraction <= 1.0)) {
    errs.emplace_back("train.elite_fraction must be in (0, 1]");
  } else if (population_size >= 4 && std::floor(elite_fraction * static_cast<double>(population_size) + 1e-9) < 1) {
    errs.emplace_back("train.elite_fraction leaves no elite candidates");
  }
  if (!(std::isfinite(noise_std_init) && noise_std_init > 0.0)) {
    errs.emplace_back("train.noise_std_init must be > 0");
  }
  if (!(noise_decay > 0.0 && noise_decay <= 1.0)) errs.emplace_back("train.noise_decay must be in (0, 1]");
  if (iterations < 1) errs.emplace_back("train.iterations must be >= 1");
  if (episodes_per_candidate < 1) errs.emplace_back("train.episodes_per_candidate must be >= 1");
  for (double l : lookaheads) {
    if (!std::isfinite(l) || l < 0.0) {
      errs.emplace_back("train.lookaheads entries must be finite and >= 0");
      break;
    }
  }
  return errs;
}

void TrainConfig::validate() const {
  const auto errs = validation_errors();
  if (errs.empty()) return;
  std::string msg = "invalid train config:";
  for (const auto& e : errs) msg += "\n  " + e;
  throw InvalidParameter(msg);
}

CemResult cem_maximize(std::size_t dim, const CemObjective& objective, const TrainConfig& config,
                       std::vector<double> initial_mean, const CemObserver& observer) {
  config.validate();
  if (initial_mean.empty()) initial_mean.assign(dim, 0.0);
  if (initial_mean.size() != dim) throw ContractViolation("cem_maximize: initial mean has wrong size");

  std::mt19937_64 rng(mix_seed(config.master_seed, 1));
  std::normal_distribution<double> normal(0.0, 1.0);

  CemResult result;
  result.final_mean = std::move(initial_mean);
  result.best_value = -std::numeric_limits<double>::infinity();
  double noise = config.noise_std_init;
  const std::size_t pop = config.population_size;
  const std::size_t elites = config.elite_count();

  std::vector<std::vector<double>> population(pop, std::vector<double>(dim));
  std::vector<double> scores(pop);
  std::vector<std::size_t> order(pop);

  for (std::size_t it = 0; it < config.iterations; ++it) {
    for (auto& cand : population) {
      for (std::size_t d = 0; d < dim; ++d) cand[d] = result.final_mean[d] + noise * normal(rng);
    }
    parallel_for(pop, [&](std::size_t i) {
      const double v = objective(population[i], it);
      scores[i] = std::isnan(v) ? -std::numeric_limits<double>::infinity() : v;
    });
    result.evaluations += pop;
    if (observer) observer(it, population, scores);

    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    if (result.best.empty() || scores[order[0]] > result.best_value) {
      result.best_value = scores[order[0]];
      result.best = population[order[0]];
    }

    IterationStats st;
    st.iteration = it;
    st.noise_std = noise;
    st.best_so_far = result.best_value;
    st.mean_return = std::accumulate(scores.begin(), scores.end(), 0.0) / static_cast<double>(pop);
    double elite_sum = 0.0;
    std::vector<double> mean(dim, 0.0);
    for (std::size_t e = 0; e < elites; ++e) {
      elite_sum += scores[order[e]];
      const auto& cand = population[order[e]];
      for (std::size_t d = 0; d < dim; ++d) mean[d] += cand[d];
    }
    for (double& m : mean) m /= static_cast<double>(elites);
    st.elite_mean_return = elite_sum / static_cast<double>(elites);
    result.stats.push_back(st);

    result.final_mean = std::move(mean);
    noise = std::max(noise * config.noise_decay, kNoiseStdFloor);
  }
  return result;
}

std::vector<std::uint64_t> iteration_seeds(const TrainConfig& config, std::size_t iteration) {
  std::vector<std::uint64_t> seeds(config.episodes_per_candidate);
  for (std::size_t e = 0; e < seeds.size(); ++e) {
    seeds[e] = mix_seed(mix_seed(config.master_seed, 2 + iteration), e);
  }
  return seeds;
}

std::vector<std::uint64_t> heldout_seeds(std::uint64_t master_seed, std::size_t n) {
  std::vector<std::uint64_t> seeds(n);
  const std::uint64_t stream = mix_seed(master_seed, 0x4e1d0u);
  for (std::size_t k = 0; k < n; ++k) seeds[k] = mix_seed(stream, k);
  return seeds;
}

TrainResult train_cem(const TrackModel& track, const RewardConfig& reward_config, const SimParams& params,
                      const TrainConfig& config) {
  reward_config.validate();
  params.validate();
  config.validate();
  const Policy shape = Policy::zeros(config.lookaheads);
  std::vector<std::vector<std::uint64_t>> seeds(config.iterations);
  for (std::size_t it = 0; it < config.iterations; ++it) seeds[it] = iteration_seeds(config, it);

  std::atomic<std::size_t> episodes{0};
  const CemObjective objective = [&](std::span<const double> candidate, std::size_t it) {
    Policy p = shape;
    p.weights.assign(candidate.begin(), candidate.end());
    double sum = 0.0;
    for (std::uint64_t seed : seeds[it]) {
      sum += rollout(p, track, reward_config, params, seed).total_reward();
      ++episodes;
    }
    return sum / static_cast<double>(seeds[it].size());
  };

  const CemResult cem = cem_maximize(shape.weights.size(), objective, config);
  TrainResult result;
  result.best_policy = shape;
  result.best_policy.weights = cem.best;
  result.best_return = cem.best_value;
  result.stats = cem.stats;
  result.total_episodes = episodes.load();
  return result;
}

}  // namespace trackforge
