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

#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "trackforge/config.hpp"
#include "trackforge/errors.hpp"
#include "trackforge/experiments.hpp"
#include "trackforge/rollout.hpp"
#include "trackforge/track.hpp"
#include "trackforge/training.hpp"
#include "trackforge/util.hpp"

namespace fs = std::filesystem;
using namespace trackforge;
using Json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

const std::vector<std::string> kExperiments = {"velocity-sweep",   "velocity-scatter", "progress-compare",
                                               "steering-compare", "steering-weighted", "ablation"};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GlobalOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string track;
  std::string run_id;
};

RunConfig resolve_config(const GlobalOptions& g) {
  RunConfig c = g.config.empty() ? RunConfig{} : load_run_config(g.config);
  if (g.seed) c.seed = *g.seed;
  if (!g.track.empty()) c.track = g.track;
  if (!g.out.empty()) c.output_dir = g.out;
  c.train.master_seed = c.seed;
  c.validate();
  return c;
}

std::string utc_stamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
  return buf;
}

struct RunDir {
  fs::path path;
  std::string id;
  std::vector<std::string> outputs;

  fs::path file(const std::string& name) {
    outputs.push_back(name);
    return path / name;
  }
};

RunDir make_run_dir(const GlobalOptions& g, const RunConfig& c) {
  RunDir d;
  d.id = g.run_id.empty() ? utc_stamp() + "-s" + std::to_string(c.seed) : g.run_id;
  d.path = fs::path(c.output_dir) / d.id;
  fs::create_directories(d.path);
  return d;
}

void write_manifest(RunDir& d, const RunConfig& c, const std::string& command, const Json& extra = Json::object()) {
  write_text_file(d.file("config.json"), to_json(c));
  Json m;
  m["manifest_version"] = 1;
  m["tool"] = "trackforge";
  m["version"] = library_version();
  m["command"] = command;
  m["run_id"] = d.id;
  m["seed"] = c.seed;
  for (const auto& [k, v] : extra.items()) m[k] = v;
  m["outputs"] = d.outputs;
  m["config"] = Json::parse(to_json(c));
  write_text_file(d.path / "manifest.json", m.dump(2) + "\n");
}

std::string stats_csv(const std::vector<IterationStats>& stats) {
  std::ostringstream out;
  out << "iteration,mean_return,elite_mean_return,best_so_far,noise_std\n";
  for (const auto& s : stats) {
    out << s.iteration << ',' << format_double(s.mean_return) << ',' << format_double(s.elite_mean_return) << ','
        << format_double(s.best_so_far) << ',' << format_double(s.noise_std) << '\n';
  }
  return out.str();
}

Policy load_checked_policy(const std::string& path, const RunConfig& c) {
  PolicyCheckpoint cp = load_policy_checkpoint(path);
  const auto& a = cp.bounds;
  const auto& b = c.sim.bounds;
  if (a.speed_min != b.speed_min || a.speed_max != b.speed_max || a.steering_limit != b.steering_limit) {
    throw InvalidParameter(path + ": action_bounds do not match the run config (checkpoint speed [" +
                           format_double(a.speed_min) + ", " + format_double(a.speed_max) + "], steering " +
                           format_double(a.steering_limit) + "; config speed [" + format_double(b.speed_min) +
                           ", " + format_double(b.speed_max) + "], steering " + format_double(b.steering_limit) + ")");
  }
  return cp.policy;
}

void print_episode(const EpisodeTrace& trace, const SimParams& sim) {
  const auto m = episode_metrics(trace, 0);
  std::cout << "termination: " << to_string(trace.termination) << '\n';
  std::cout << "steps: " << m.steps << '\n';
  std::cout << "lap_time: "
            << (m.completed ? format_double(static_cast<double>(m.steps) * sim.dt) + " s" : std::string("n/a"))
            << '\n';
  std::cout << "mean_speed: " << format_double(m.mean_speed) << " m/s\n";
  std::cout << "smoothness: " << format_double(m.smoothness) << " deg/step\n";
  std::cout << "return: " << format_double(m.episode_return) << '\n';
}

int cmd_config_init(const std::string& path) {
  const RunConfig c;
  const fs::path p(path);
  write_text_file(p, to_json(c));
  fs::path tmpl = p.parent_path() / (p.stem().string() + ".template.jsonc");
  write_text_file(tmpl, commented_config_template(c));
  std::cout << "wrote " << p.string() << " and " << tmpl.string() << '\n';
  return kExitOk;
}

int cmd_simulate(const GlobalOptions& g, const std::string& policy_path) {
  const RunConfig c = resolve_config(g);
  const TrackModel track = load_track_spec(c.track, c.half_width);
  const Policy policy = policy_path.empty() ? Policy::zeros(c.train.lookaheads) : load_checked_policy(policy_path, c);
  const EpisodeTrace trace = rollout(policy, track, c.reward, c.sim, c.seed);
  RunDir d = make_run_dir(g, c);
  save_trace_csv(d.file("trace.csv"), trace);
  write_manifest(d, c, "simulate", Json{{"policy", policy_path.empty() ? "zeros" : policy_path}});
  print_episode(trace, c.sim);
  std::cout << "output: " << d.path.string() << '\n';
  return kExitOk;
}

int cmd_train(const GlobalOptions& g) {
  const RunConfig c = resolve_config(g);
  const TrackModel track = load_track_spec(c.track, c.half_width);
  const TrainResult r = train_cem(track, c.reward, c.sim, c.train);
  RunDir d = make_run_dir(g, c);
  write_text_file(d.file("checkpoint.json"), to_json(PolicyCheckpoint{r.best_policy, c.sim.bounds, c.seed}));
  write_text_file(d.file("train_stats.csv"), stats_csv(r.stats));
  write_manifest(d, c, "train", Json{{"episodes", r.total_episodes}});
  std::cout << "best_return: " << format_double(r.best_return) << '\n';
  std::cout << "episodes: " << r.total_episodes << '\n';
  std::cout << "output: " << d.path.string() << '\n';
  return kExitOk;
}

int cmd_evaluate(const GlobalOptions& g, const std::string& policy_path, std::size_t episodes) {
  const RunConfig c = resolve_config(g);
  const TrackModel track = load_track_spec(c.track, c.half_width);
  const Policy policy = load_checked_policy(policy_path, c);
  const auto seeds = heldout_seeds(c.seed, episodes);
  const EvaluationResult r = evaluate_policy(policy, track, c.reward, c.sim, seeds, true);
  RunDir d = make_run_dir(g, c);
  std::ostringstream csv;
  csv << "episode,seed,return,completed,steps,lap_time,mean_speed,smoothness,termination\n";
  std::size_t completed = 0;
  for (std::size_t k = 0; k < r.episodes.size(); ++k) {
    const auto& m = r.episodes[k];
    completed += m.completed ? 1 : 0;
    csv << k << ',' << m.seed << ',' << format_double(m.episode_return) << ',' << (m.completed ? 1 : 0) << ','
        << m.steps << ','
        << format_double(m.completed ? static_cast<double>(m.steps) * c.sim.dt : std::nan("")) << ','
        << format_double(m.mean_speed) << ',' << format_double(m.smoothness) << ',' << to_string(m.termination)
        << '\n';
    save_trace_csv(d.file("eval_" + std::to_string(k) + ".csv"), r.traces[k]);
  }
  write_text_file(d.file("evaluation.csv"), csv.str());
  write_manifest(d, c, "evaluate", Json{{"policy", policy_path}, {"episodes", episodes}});
  std::cout << "completed: " << completed << "/" << episodes << '\n';
  std::cout << "mean_return: " << format_double(r.mean_return) << '\n';
  std::cout << "output: " << d.path.string() << '\n';
  return kExitOk;
}

int cmd_experiment(const GlobalOptions& g, const std::string& name) {
  if (std::find(kExperiments.begin(), kExperiments.end(), name) == kExperiments.end()) {
    std::string valid;
    for (const auto& e : kExperiments) valid += (valid.empty() ? "" : ", ") + e;
    throw UsageError("unknown experiment '" + name + "'; valid names: " + valid);
  }
  const RunConfig c = resolve_config(g);
  const ExperimentConfig& e = c.experiments;
  RunDir d = make_run_dir(g, c);
  if (name == "velocity-sweep") {
    const auto grid = e.error_grid();
    sweep_velocity_reward(e.velocity_alphas, grid).save(d.file("velocity_sweep.csv"));
  } else if (name == "velocity-scatter") {
    scatter_velocity_reward(e.scatter_alpha, e.scatter_samples, c.seed).save(d.file("velocity_scatter.csv"));
  } else if (name == "progress-compare") {
    compare_progress_rewards(e.progress_trace, e.progress_epsilon).save(d.file("progress_compare.csv"));
  } else if (name == "steering-compare") {
    const auto cmp = compare_steering_penalties(e.steering_k, e.steering_steps, c.seed);
    cmp.table.save(d.file("steering_compare.csv"));
    std::cout << "mean_abs_smooth: " << format_double(cmp.mean_abs_smooth) << '\n';
    std::cout << "mean_abs_abrupt: " << format_double(cmp.mean_abs_abrupt) << '\n';
  } else if (name == "steering-weighted") {
    compare_weighted_steering(e.weighted).save(d.file("steering_weighted.csv"));
  } else {
    const TrackModel track = load_track_spec(c.track, c.half_width);
    AblationSetup setup;
    setup.variants = ablation_preset_variants(e.ablation.preset, c.reward);
    setup.sim = c.sim;
    setup.train = c.train;
    setup.train_seeds = e.ablation.train_seeds;
    setup.eval_seeds = heldout_seeds(c.seed, e.ablation.eval_episodes);
    setup.spike_factor = e.ablation.spike_factor;
    const AblationResult r = run_ablation(track, setup, d.path / "traces");
    r.summary_table().save(d.file("ablation_summary.csv"));
    r.per_seed_table().save(d.file("ablation_per_seed.csv"));
    write_text_file(d.file("ablation_report.txt"), r.report());
    std::cout << r.report();
  }
  write_manifest(d, c, "experiment", Json{{"experiment", name}});
  std::cout << "output: " << d.path.string() << '\n';
  return kExitOk;
}

struct TrackGenOptions {
  std::string shape;
  std::string path;
  double radius = 1.5;
  double straight = 6.0;
  double side = 3.0;
  double spacing = 0.1;
  std::size_t points = 360;
};

int cmd_track_gen(const TrackGenOptions& o) {
  std::vector<Waypoint> pts;
  if (o.shape == "oval") pts = shapes::oval();
  else if (o.shape == "slow-corner") pts = shapes::slow_corner();
  else if (o.shape == "circle") pts = shapes::circle(o.radius, o.points);
  else if (o.shape == "square") pts = shapes::square(o.side, o.spacing);
  else pts = shapes::stadium(o.straight, o.radius, o.spacing);
  save_track(o.path, pts);
  std::cout << "wrote " << pts.size() << " waypoints to " << o.path << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"trackforge: reward shaping experiments on a simulated race track"};
  app.set_version_flag("--version", std::string(library_version()));
  app.require_subcommand(1);

  GlobalOptions g;
  std::uint64_t seed = 0;
  app.add_option("--config", g.config, "Run config JSON (or a run manifest)")->check(CLI::ExistingFile);
  auto* seed_opt = app.add_option("--seed", seed, "Master seed; overrides the config");
  app.add_option("--out", g.out, "Output root directory; overrides the config");
  app.add_option("--track", g.track, "Track CSV or builtin:oval / builtin:slow-corner; overrides the config");
  app.add_option("--run-id", g.run_id, "Run directory name (default: UTC timestamp + seed)");

  auto* config_cmd = app.add_subcommand("config", "Config file utilities");
  config_cmd->require_subcommand(1);
  std::string init_path;
  auto* init_cmd = config_cmd->add_subcommand("init", "Write the default config and a commented template");
  init_cmd->add_option("path", init_path, "Destination JSON path")->required();

  std::string policy_path;
  auto* sim_cmd = app.add_subcommand("simulate", "Roll out one seeded episode and write its trace");
  sim_cmd->add_option("--policy", policy_path, "Policy checkpoint (default: all-zero policy)");

  auto* train_cmd = app.add_subcommand("train", "Train a policy with the cross-entropy method");

  std::string eval_policy;
  std::size_t eval_episodes = 10;
  auto* eval_cmd = app.add_subcommand("evaluate", "Evaluate a checkpoint on held-out seeds");
  eval_cmd->add_option("--policy", eval_policy, "Policy checkpoint")->required();
  eval_cmd->add_option("--episodes", eval_episodes, "Number of held-out episodes")->check(CLI::PositiveNumber);

  std::string experiment;
  auto* exp_cmd = app.add_subcommand("experiment", "Generate an experiment table");
  exp_cmd->add_option("name", experiment, "One of: velocity-sweep, velocity-scatter, progress-compare, "
                                          "steering-compare, steering-weighted, ablation")
      ->required();

  TrackGenOptions gen;
  auto* track_cmd = app.add_subcommand("track", "Track utilities");
  track_cmd->require_subcommand(1);
  auto* gen_cmd = track_cmd->add_subcommand("gen", "Write a generated track CSV");
  gen_cmd->add_option("shape", gen.shape, "oval | slow-corner | circle | square | stadium")
      ->required()
      ->check(CLI::IsMember({"oval", "slow-corner", "circle", "square", "stadium"}));
  gen_cmd->add_option("path", gen.path, "Destination CSV")->required();
  gen_cmd->add_option("--radius", gen.radius, "circle / stadium radius, m");
  gen_cmd->add_option("--straight", gen.straight, "stadium straight length, m");
  gen_cmd->add_option("--side", gen.side, "square side, m");
  gen_cmd->add_option("--spacing", gen.spacing, "waypoint spacing, m");
  gen_cmd->add_option("--points", gen.points, "circle waypoint count");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }
  if (*seed_opt) g.seed = seed;

  try {
    if (*init_cmd) return cmd_config_init(init_path);
    if (*sim_cmd) return cmd_simulate(g, policy_path);
    if (*train_cmd) return cmd_train(g);
    if (*eval_cmd) return cmd_evaluate(g, eval_policy, eval_episodes);
    if (*exp_cmd) return cmd_experiment(g, experiment);
    if (*gen_cmd) return cmd_track_gen(gen);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}
