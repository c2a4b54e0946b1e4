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

#include "trackforge/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "trackforge/errors.hpp"
#include "trackforge/util.hpp"

namespace trackforge {

std::size_t Table::column(std::string_view name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw ContractViolation("no column `" + std::string(name) + "`");
  return static_cast<std::size_t>(it - columns.begin());
}

std::string Table::to_csv() const {
  std::ostringstream out;
  const bool labelled = !label_column.empty();
  if (labelled) out << label_column << (columns.empty() ? "" : ",");
  for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << columns[c];
  out << '\n';
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (labelled) out << labels.at(r) << (rows[r].empty() ? "" : ",");
    for (std::size_t c = 0; c < rows[r].size(); ++c) out << (c ? "," : "") << format_double(rows[r][c]);
    out << '\n';
  }
  for (const auto& f : footer) out << "# " << f << '\n';
  return out.str();
}

void Table::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << to_csv();
}

Table sweep_velocity_reward(std::span<const double> alphas, std::span<const double> errors) {
  Table t;
  t.columns = {"alpha", "error", "reward"};
  for (double alpha : alphas) {
    if (!(alpha > 0.0)) throw InvalidParameter("sweep_velocity_reward: alpha must be > 0");
    const VelocityRewardParams params{alpha, 1.0};
    for (double e : errors) t.rows.push_back({alpha, e, velocity_reward(params.v_target - e, params)});
  }
  return t;
}

Table scatter_velocity_reward(double alpha, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw InvalidParameter("scatter_velocity_reward: n must be > 0");
  const VelocityRewardParams params{alpha, 1.0};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  Table t;
  t.columns = {"v_actual", "error", "reward"};
  for (std::size_t i = 0; i < n; ++i) {
    const double v = uniform(rng);
    t.rows.push_back({v, std::abs(params.v_target - v), velocity_reward(v, params)});
  }
  return t;
}

Table compare_progress_rewards(const SyntheticProgressTrace& g, double epsilon) {
  if (!(epsilon > 0.0)) throw InvalidParameter("compare_progress_rewards: epsilon must be > 0");
  if (g.period == 0) throw InvalidParameter("compare_progress_rewards: period must be > 0");
  std::mt19937_64 rng(g.seed);
  std::uniform_real_distribution<double> jitter(-1.0, 1.0);
  Table t;
  t.columns = {"t", "dl", "dprogress", "r_raw", "r_regularized"};
  for (std::size_t i = 0; i < g.steps; ++i) {
    const double phase = 2.0 * std::numbers::pi * static_cast<double>(i % g.period) / static_cast<double>(g.period);
    const double wave = 0.5 * (1.0 - std::cos(phase));
    const double dl = g.dl_floor + (g.dl_peak - g.dl_floor) * wave * (1.0 + g.jitter * jitter(rng));
    const double raw = dl > 0.0 ? progress_reward_raw(g.d_progress, dl) : std::numeric_limits<double>::quiet_NaN();
    t.rows.push_back({static_cast<double>(i), dl, g.d_progress, raw,
                      progress_reward_regularized(g.d_progress, dl, epsilon)});
  }
  t.footer.push_back("epsilon=" + format_double(epsilon));
  return t;
}

std::vector<double> abrupt_steering_profile(std::size_t n, std::uint64_t seed, double range) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(-range, range);
  std::vector<double> out(n);
  for (double& v : out) v = uniform(rng);
  return out;
}

SteeringComparison compare_steering_penalties(double k, std::size_t n_steps, std::uint64_t seed,
                                              const SteeringProfiles& profiles) {
  SteeringComparison out;
  out.table.columns = {"t", "dtheta_smooth", "r_smooth", "dtheta_abrupt", "r_abrupt"};
  const auto abrupt = abrupt_steering_profile(n_steps, seed, profiles.abrupt_range);
  double sum_smooth = 0.0;
  double sum_abrupt = 0.0;
  for (std::size_t i = 0; i < n_steps; ++i) {
    const double smooth = profiles.smooth_amplitude *
                          std::sin(2.0 * std::numbers::pi * static_cast<double>(i) /
                                   static_cast<double>(profiles.smooth_period));
    const double r_smooth = steering_penalty(smooth, k);
    const double r_abrupt = steering_penalty(abrupt[i], k);
    sum_smooth += std::abs(r_smooth);
    sum_abrupt += std::abs(r_abrupt);
    out.table.rows.push_back({static_cast<double>(i), smooth, r_smooth, abrupt[i], r_abrupt});
  }
  if (n_steps > 0) {
    out.mean_abs_smooth = sum_smooth / static_cast<double>(n_steps);
    out.mean_abs_abrupt = sum_abrupt / static_cast<double>(n_steps);
  }
  out.table.footer.push_back("mean_abs_r_smooth=" + format_double(out.mean_abs_smooth));
  out.table.footer.push_back("mean_abs_r_abrupt=" + format_double(out.mean_abs_abrupt));
  return out;
}

Table compare_weighted_steering(const WeightedSteeringSetup& s) {
  if (s.block_length == 0) throw InvalidParameter("compare_weighted_steering: block_length must be > 0");
  const auto steer = abrupt_steering_profile(s.steps, s.seed, s.abrupt_range);
  Table t;
  t.columns = {"t", "curvature", "w_curve", "r_unweighted", "r_weighted"};
  for (std::size_t i = 0; i < s.steps; ++i) {
    const bool arc = (i / s.block_length) % 2 == 1;
    const double kappa = arc ? s.arc_curvature : 0.0;
    const double w = s.form == CurveWeighting::MinForm     ? curve_weight_min(kappa, s.gamma)
                     : s.form == CurveWeighting::RationalForm ? curve_weight_rational(kappa, s.gamma)
                                                               : 0.0;
    t.rows.push_back({static_cast<double>(i), kappa, w, steering_penalty(steer[i], s.k),
                      steering_penalty_weighted(steer[i], s.k, w, 1.0)});
  }
  return t;
}

namespace {

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

double mean_of(std::span<const double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_std(std::span<const double> v) {
  if (v.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

std::string fmt_num(double v, int precision = 4) {
  if (std::isnan(v)) return "n/a";
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(precision);
  out << v;
  return out.str();
}

}  // namespace

AblationSummary summarize_traces(const std::string& variant, std::span<const EpisodeTrace> traces, double dt,
                                 double spike_factor) {
  AblationSummary s;
  s.variant = variant;
  s.episodes = traces.size();
  std::size_t completed = 0;
  double lap_time = 0.0;
  double speed = 0.0;
  double steer = 0.0;
  double r_sum = 0.0;
  std::size_t spikes = 0;
  for (const auto& tr : traces) {
    if (tr.termination == Termination::Completed) {
      ++completed;
      lap_time += static_cast<double>(tr.steps.size()) * dt;
    }
    std::vector<double> abs_progress;
    abs_progress.reserve(tr.steps.size());
    for (const auto& r : tr.steps) {
      speed += r.state.speed;
      steer += std::abs(r.d_steer);
      r_sum += r.reward.total;
      abs_progress.push_back(std::abs(r.reward.progress));
    }
    const double threshold = spike_factor * median(abs_progress);
    for (double a : abs_progress) spikes += a > threshold ? 1 : 0;
    s.steps += tr.steps.size();
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  s.completion_rate = s.episodes ? static_cast<double>(completed) / static_cast<double>(s.episodes) : 0.0;
  s.mean_lap_time = completed ? lap_time / static_cast<double>(completed) : nan;
  if (s.steps > 0) {
    const double n = static_cast<double>(s.steps);
    s.mean_speed = speed / n;
    s.smoothness = steer / n;
    s.spike_fraction = static_cast<double>(spikes) / n;
    const double mean_r = r_sum / n;
    double ss = 0.0;
    for (const auto& tr : traces) {
      for (const auto& r : tr.steps) ss += (r.reward.total - mean_r) * (r.reward.total - mean_r);
    }
    s.reward_variance = ss / n;
  } else {
    s.mean_speed = s.smoothness = s.spike_fraction = s.reward_variance = nan;
  }
  return s;
}

namespace {

std::vector<double> summary_row(const AblationSummary& s) {
  return {static_cast<double>(s.episodes), static_cast<double>(s.steps), s.completion_rate, s.mean_lap_time,
          s.mean_speed, s.smoothness, s.reward_variance, s.spike_fraction, s.train_best_return,
          s.failed ? 1.0 : 0.0};
}

const std::vector<std::string> kSummaryColumns = {
    "episodes", "steps", "completion_rate", "mean_lap_time", "mean_speed", "smoothness_index",
    "reward_variance", "spike_fraction", "train_best_return", "failed"};

}  // namespace

Table AblationResult::summary_table() const {
  Table t;
  t.label_column = "variant";
  t.columns = kSummaryColumns;
  for (const auto& s : summaries) {
    t.labels.push_back(s.variant);
    t.rows.push_back(summary_row(s));
  }
  for (const auto& s : summaries) {
    if (s.failed) t.footer.push_back("failed " + s.variant + ": " + s.error);
  }
  return t;
}

Table AblationResult::per_seed_table() const {
  Table t;
  t.label_column = "variant";
  t.columns = kSummaryColumns;
  t.columns.insert(t.columns.begin(), "train_seed");
  for (const auto& run : runs) {
    t.labels.push_back(run.variant);
    auto row = summary_row(run.summary);
    row.insert(row.begin(), static_cast<double>(run.train_seed));
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::string AblationResult::report() const {
  std::ostringstream out;
  if (summaries.empty()) return "no variants\n";
  const auto& base = summaries.front();
  const auto per_seed = [&](const std::string& name) {
    std::vector<double> v;
    for (const auto& r : runs) {
      if (r.variant == name && !r.summary.failed) v.push_back(r.summary.smoothness);
    }
    return v;
  };
  out << "baseline: " << base.variant << '\n';
  for (std::size_t i = 1; i < summaries.size(); ++i) {
    const auto& s = summaries[i];
    out << "variant " << s.variant << " vs " << base.variant << ":\n";
    if (s.failed || base.failed) {
      out << "  comparison skipped (training failed)\n";
      continue;
    }
    const double d_smooth = s.smoothness - base.smoothness;
    const auto a = per_seed(s.variant);
    const auto b = per_seed(base.variant);
    const double sa = sample_std(a);
    const double sb = sample_std(b);
    const double pooled = std::sqrt(0.5 * (sa * sa + sb * sb));
    const double effect = pooled > 0.0 ? (mean_of(a) - mean_of(b)) / pooled : std::numeric_limits<double>::quiet_NaN();
    out << "  smoothness_index " << fmt_num(s.smoothness) << " vs " << fmt_num(base.smoothness) << " deg/step ("
        << (d_smooth < 0 ? "smoother" : d_smooth > 0 ? "rougher" : "equal") << ", delta " << fmt_num(d_smooth)
        << ", effect size d=" << fmt_num(effect, 3) << " over " << a.size() << "/" << b.size() << " seeds)\n";
    out << "  completion_rate " << fmt_num(s.completion_rate) << " vs " << fmt_num(base.completion_rate)
        << " (delta " << fmt_num(s.completion_rate - base.completion_rate) << ")\n";
    out << "  spike_fraction " << fmt_num(s.spike_fraction, 6) << " vs " << fmt_num(base.spike_fraction, 6)
        << " (" << (s.spike_fraction < base.spike_fraction ? "fewer spikes" : s.spike_fraction > base.spike_fraction ? "more spikes" : "equal") << ")\n";
  }
  return out.str();
}

std::vector<AblationVariant> ablation_preset_variants(std::string_view preset, const RewardConfig& base) {
  if (preset == "progress-regularization") {
    RewardConfig reg = base;
    reg.composite.straight.velocity = 0.0;
    reg.composite.curved.velocity = 0.0;
    if (reg.progress.mode == ProgressMode::Unregularized) reg.progress.mode = ProgressMode::FixedEpsilon;
    RewardConfig unreg = reg;
    unreg.progress.mode = ProgressMode::Unregularized;
    return {{"unregularized", unreg}, {"regularized", reg}};
  }
  if (preset == "steering-weighting") {
    RewardConfig weighted = base;
    if (weighted.steering.weighting == CurveWeighting::None) weighted.steering.weighting = CurveWeighting::RationalForm;
    RewardConfig unweighted = base;
    unweighted.steering.weighting = CurveWeighting::None;
    return {{"unweighted", unweighted}, {"weighted", weighted}};
  }
  if (preset == "steering-weight") {
    RewardConfig off = base;
    off.composite.curved.steer = 0.0;
    RewardConfig on = base;
    on.composite.curved.steer = 0.5;
    return {{"w_steer_0", off}, {"w_steer_0.5", on}};
  }
  throw InvalidParameter("unknown ablation preset: " + std::string(preset));
}

AblationResult run_ablation(const TrackModel& track, const AblationSetup& setup,
                            const std::optional<std::filesystem::path>& output_dir) {
  if (setup.variants.size() < 2) throw InvalidParameter("run_ablation: need at least two variants");
  if (setup.eval_seeds.empty()) throw InvalidParameter("run_ablation: need eval seeds");
  setup.sim.validate();
  setup.train.validate();
  std::vector<std::uint64_t> train_seeds = setup.train_seeds;
  if (train_seeds.empty()) train_seeds.push_back(setup.train.master_seed);
  if (output_dir) std::filesystem::create_directories(*output_dir);

  AblationResult result;
  for (const auto& variant : setup.variants) {
    std::vector<EpisodeTrace> pooled;
    double best_return = -std::numeric_limits<double>::infinity();
    bool failed = false;
    std::string error;
    for (std::uint64_t train_seed : train_seeds) {
      AblationRun run;
      run.variant = variant.name;
      run.train_seed = train_seed;
      try {
        TrainConfig cfg = setup.train;
        cfg.master_seed = train_seed;
        run.training = train_cem(track, variant.reward, setup.sim, cfg);
        auto eval = evaluate_policy(run.training.best_policy, track, variant.reward, setup.sim,
                                    setup.eval_seeds, true);
        run.traces = std::move(eval.traces);
        run.summary = summarize_traces(variant.name, run.traces, setup.sim.dt, setup.spike_factor);
        run.summary.train_best_return = run.training.best_return;
        best_return = std::max(best_return, run.training.best_return);
        if (output_dir) {
          for (std::size_t k = 0; k < run.traces.size(); ++k) {
            save_trace_csv(*output_dir / (variant.name + "_seed" + std::to_string(train_seed) + "_eval" +
                                          std::to_string(k) + ".csv"),
                           run.traces[k]);
          }
        }
        pooled.insert(pooled.end(), run.traces.begin(), run.traces.end());
      } catch (const std::exception& e) {
        run.summary.variant = variant.name;
        run.summary.failed = true;
        run.summary.error = e.what();
        failed = true;
        if (error.empty()) error = e.what();
      }
      result.runs.push_back(std::move(run));
    }
    AblationSummary s = summarize_traces(variant.name, pooled, setup.sim.dt, setup.spike_factor);
    s.train_best_return = best_return;
    s.failed = failed;
    s.error = error;
    result.summaries.push_back(std::move(s));
  }
  return result;
}

}  // namespace trackforge
