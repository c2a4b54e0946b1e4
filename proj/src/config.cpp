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

#include "trackforge/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "trackforge/errors.hpp"

namespace trackforge {

using Json = nlohmann::ordered_json;

namespace {

// Reads the fields of one JSON object, recording a message per bad or
// unknown field instead of stopping at the first.
class ObjectReader {
 public:
  ObjectReader(const Json* obj, std::string path, std::vector<std::string>* errors)
      : obj_(obj), path_(std::move(path)), errors_(errors) {}

  ObjectReader child(const char* key) {
    seen_.insert(key);
    static const Json empty = Json::object();
    if (!obj_->contains(key)) return ObjectReader(&empty, name(key), errors_);
    const Json& v = (*obj_)[key];
    if (!v.is_object()) {
      fail(key, "expected an object");
      return ObjectReader(&empty, name(key), errors_);
    }
    return ObjectReader(&v, name(key), errors_);
  }

  void number(const char* key, double& out) {
    if (const Json* v = take(key)) {
      if (v->is_number()) out = v->get<double>();
      else fail(key, "expected a number");
    }
  }

  void count(const char* key, std::size_t& out) {
    if (const Json* v = take(key)) {
      if (v->is_number_unsigned()) out = v->get<std::size_t>();
      else if (v->is_number_integer() && v->get<long long>() >= 0) out = static_cast<std::size_t>(v->get<long long>());
      else fail(key, "expected a non-negative integer");
    }
  }

  void seed(const char* key, std::uint64_t& out) {
    std::size_t tmp = out;
    count(key, tmp);
    out = tmp;
  }

  void flag(const char* key, bool& out) {
    if (const Json* v = take(key)) {
      if (v->is_boolean()) out = v->get<bool>();
      else fail(key, "expected true or false");
    }
  }

  void text(const char* key, std::string& out) {
    if (const Json* v = take(key)) {
      if (v->is_string()) out = v->get<std::string>();
      else fail(key, "expected a string");
    }
  }

  void numbers(const char* key, std::vector<double>& out) {
    if (const Json* v = take(key)) {
      std::vector<double> tmp;
      bool ok = v->is_array();
      if (ok) {
        for (const auto& e : *v) {
          if (!e.is_number()) { ok = false; break; }
          tmp.push_back(e.get<double>());
        }
      }
      if (ok) out = std::move(tmp);
      else fail(key, "expected an array of numbers");
    }
  }

  void seeds(const char* key, std::vector<std::uint64_t>& out) {
    if (const Json* v = take(key)) {
      std::vector<std::uint64_t> tmp;
      bool ok = v->is_array();
      if (ok) {
        for (const auto& e : *v) {
          if (!e.is_number_unsigned()) { ok = false; break; }
          tmp.push_back(e.get<std::uint64_t>());
        }
      }
      if (ok) out = std::move(tmp);
      else fail(key, "expected an array of non-negative integers");
    }
  }

  template <class Enum, std::size_t N>
  void choice(const char* key, Enum& out, const std::pair<const char*, Enum> (&names)[N]) {
    if (const Json* v = take(key)) {
      if (v->is_string()) {
        const auto s = v->get<std::string>();
        for (const auto& [n, e] : names) {
          if (s == n) {
            out = e;
            return;
          }
        }
      }
      std::string valid;
      for (const auto& [n, e] : names) valid += (valid.empty() ? "" : ", ") + std::string(n);
      fail(key, "expected one of: " + valid);
    }
  }

  void ignore(const char* key) { seen_.insert(key); }

  void finish() const {
    for (const auto& [k, v] : obj_->items()) {
      if (!seen_.contains(k)) errors_->push_back(name(k.c_str()) + ": unknown key");
    }
  }

 private:
  const Json* take(const char* key) {
    seen_.insert(key);
    return obj_->contains(key) ? &(*obj_)[key] : nullptr;
  }
  std::string name(const char* key) const { return path_.empty() ? key : path_ + "." + key; }
  void fail(const char* key, const std::string& what) { errors_->push_back(name(key) + ": " + what); }

  const Json* obj_;
  std::string path_;
  std::vector<std::string>* errors_;
  std::set<std::string> seen_;
};

constexpr std::pair<const char*, ProgressMode> kProgressModes[] = {
    {"unregularized", ProgressMode::Unregularized},
    {"fixed_epsilon", ProgressMode::FixedEpsilon},
    {"adaptive_epsilon", ProgressMode::AdaptiveEpsilon},
    {"decaying_epsilon", ProgressMode::DecayingEpsilon}};
constexpr std::pair<const char*, CurveWeighting> kWeightings[] = {
    {"none", CurveWeighting::None}, {"min", CurveWeighting::MinForm}, {"rational", CurveWeighting::RationalForm}};
constexpr std::pair<const char*, GammaMode> kGammaModes[] = {{"fixed", GammaMode::Fixed},
                                                             {"adaptive", GammaMode::Adaptive}};

Json triple_json(const WeightTriple& t) {
  return Json{{"w_progress", t.progress}, {"w_steer", t.steer}, {"w_velocity", t.velocity}};
}

void read_triple(ObjectReader r, WeightTriple& t) {
  r.number("w_progress", t.progress);
  r.number("w_steer", t.steer);
  r.number("w_velocity", t.velocity);
  r.finish();
}

Json reward_json(const RewardConfig& c) {
  Json j;
  j["velocity"] = {{"alpha_v", c.velocity.alpha_v}, {"v_target", c.velocity.v_target}};
  j["progress"] = {{"mode", to_string(c.progress.mode)},
                   {"epsilon", c.progress.epsilon},
                   {"alpha_eps", c.progress.alpha_eps},
                   {"epsilon0", c.progress.epsilon0},
                   {"beta", c.progress.beta}};
  j["steering"] = {{"k", c.steering.k},
                   {"weighting", to_string(c.steering.weighting)},
                   {"gamma_mode", to_string(c.steering.gamma_mode)},
                   {"gamma", c.steering.gamma},
                   {"alpha_gamma", c.steering.alpha_gamma},
                   {"v_scale", c.steering.v_scale},
                   {"curvature_window", c.steering.curvature_window}};
  j["composite"] = {{"straight", triple_json(c.composite.straight)},
                    {"curved", triple_json(c.composite.curved)},
                    {"curvature_threshold", c.composite.curvature_threshold}};
  return j;
}

void read_reward(ObjectReader r, RewardConfig& c) {
  {
    auto v = r.child("velocity");
    v.number("alpha_v", c.velocity.alpha_v);
    v.number("v_target", c.velocity.v_target);
    v.finish();
  }
  {
    auto p = r.child("progress");
    p.choice("mode", c.progress.mode, kProgressModes);
    p.number("epsilon", c.progress.epsilon);
    p.number("alpha_eps", c.progress.alpha_eps);
    p.number("epsilon0", c.progress.epsilon0);
    p.number("beta", c.progress.beta);
    p.finish();
  }
  {
    auto s = r.child("steering");
    s.number("k", c.steering.k);
    s.choice("weighting", c.steering.weighting, kWeightings);
    s.choice("gamma_mode", c.steering.gamma_mode, kGammaModes);
    s.number("gamma", c.steering.gamma);
    s.number("alpha_gamma", c.steering.alpha_gamma);
    s.number("v_scale", c.steering.v_scale);
    s.number("curvature_window", c.steering.curvature_window);
    s.finish();
  }
  {
    auto m = r.child("composite");
    read_triple(m.child("straight"), c.composite.straight);
    read_triple(m.child("curved"), c.composite.curved);
    m.number("curvature_threshold", c.composite.curvature_threshold);
    m.finish();
  }
  r.finish();
}

Json sim_json(const SimParams& s) {
  return Json{{"dt", s.dt},
              {"wheelbase", s.wheelbase},
              {"max_accel", s.max_accel},
              {"max_steps", s.max_steps},
              {"off_track_tolerance", s.off_track_tolerance},
              {"speed_min", s.bounds.speed_min},
              {"speed_max", s.bounds.speed_max},
              {"steering_limit", s.bounds.steering_limit},
              {"random_start", s.random_start}};
}

void read_sim(ObjectReader r, SimParams& s) {
  r.number("dt", s.dt);
  r.number("wheelbase", s.wheelbase);
  r.number("max_accel", s.max_accel);
  r.count("max_steps", s.max_steps);
  r.number("off_track_tolerance", s.off_track_tolerance);
  r.number("speed_min", s.bounds.speed_min);
  r.number("speed_max", s.bounds.speed_max);
  r.number("steering_limit", s.bounds.steering_limit);
  r.flag("random_start", s.random_start);
  r.finish();
}

Json train_json(const TrainConfig& t) {
  return Json{{"population_size", t.population_size},
              {"elite_fraction", t.elite_fraction},
              {"noise_std_init", t.noise_std_init},
              {"noise_decay", t.noise_decay},
              {"iterations", t.iterations},
              {"episodes_per_candidate", t.episodes_per_candidate},
              {"lookaheads", t.lookaheads}};
}

void read_train(ObjectReader r, TrainConfig& t) {
  r.count("population_size", t.population_size);
  r.number("elite_fraction", t.elite_fraction);
  r.number("noise_std_init", t.noise_std_init);
  r.number("noise_decay", t.noise_decay);
  r.count("iterations", t.iterations);
  r.count("episodes_per_candidate", t.episodes_per_candidate);
  r.numbers("lookaheads", t.lookaheads);
  r.finish();
}

Json experiments_json(const ExperimentConfig& e) {
  Json j;
  j["velocity_alphas"] = e.velocity_alphas;
  j["velocity_errors"] = e.velocity_errors;
  j["scatter_alpha"] = e.scatter_alpha;
  j["scatter_samples"] = e.scatter_samples;
  j["progress_epsilon"] = e.progress_epsilon;
  j["progress_trace"] = {{"steps", e.progress_trace.steps},       {"period", e.progress_trace.period},
                         {"dl_peak", e.progress_trace.dl_peak},   {"dl_floor", e.progress_trace.dl_floor},
                         {"d_progress", e.progress_trace.d_progress}, {"jitter", e.progress_trace.jitter},
                         {"seed", e.progress_trace.seed}};
  j["steering_k"] = e.steering_k;
  j["steering_steps"] = e.steering_steps;
  j["weighted"] = {{"k", e.weighted.k},
                   {"gamma", e.weighted.gamma},
                   {"form", to_string(e.weighted.form)},
                   {"arc_curvature", e.weighted.arc_curvature},
                   {"block_length", e.weighted.block_length},
                   {"steps", e.weighted.steps},
                   {"seed", e.weighted.seed},
                   {"abrupt_range", e.weighted.abrupt_range}};
  j["ablation"] = {{"preset", e.ablation.preset},
                   {"eval_episodes", e.ablation.eval_episodes},
                   {"train_seeds", e.ablation.train_seeds},
                   {"spike_factor", e.ablation.spike_factor}};
  return j;
}

void read_experiments(ObjectReader r, ExperimentConfig& e) {
  r.numbers("velocity_alphas", e.velocity_alphas);
  r.numbers("velocity_errors", e.velocity_errors);
  r.number("scatter_alpha", e.scatter_alpha);
  r.count("scatter_samples", e.scatter_samples);
  r.number("progress_epsilon", e.progress_epsilon);
  {
    auto p = r.child("progress_trace");
    p.count("steps", e.progress_trace.steps);
    p.count("period", e.progress_trace.period);
    p.number("dl_peak", e.progress_trace.dl_peak);
    p.number("dl_floor", e.progress_trace.dl_floor);
    p.number("d_progress", e.progress_trace.d_progress);
    p.number("jitter", e.progress_trace.jitter);
    p.seed("seed", e.progress_trace.seed);
    p.finish();
  }
  r.number("steering_k", e.steering_k);
  r.count("steering_steps", e.steering_steps);
  {
    auto w = r.child("weighted");
    w.number("k", e.weighted.k);
    w.number("gamma", e.weighted.gamma);
    w.choice("form", e.weighted.form, kWeightings);
    w.number("arc_curvature", e.weighted.arc_curvature);
    w.count("block_length", e.weighted.block_length);
    w.count("steps", e.weighted.steps);
    w.seed("seed", e.weighted.seed);
    w.number("abrupt_range", e.weighted.abrupt_range);
    w.finish();
  }
  {
    auto a = r.child("ablation");
    a.text("preset", e.ablation.preset);
    a.count("eval_episodes", e.ablation.eval_episodes);
    a.seeds("train_seeds", e.ablation.train_seeds);
    a.number("spike_factor", e.ablation.spike_factor);
    a.finish();
  }
  r.finish();
}

Json run_json(const RunConfig& c) {
  Json j;
  j["track"] = c.track;
  j["half_width"] = c.half_width;
  j["seed"] = c.seed;
  j["output_dir"] = c.output_dir;
  j["sim"] = sim_json(c.sim);
  j["reward"] = reward_json(c.reward);
  j["train"] = train_json(c.train);
  j["experiments"] = experiments_json(c.experiments);
  return j;
}

Json parse_json(std::string_view text, const char* what) {
  try {
    return Json::parse(text.begin(), text.end(), nullptr, true, true);
  } catch (const Json::parse_error& e) {
    throw InvalidParameter(std::string(what) + ": malformed JSON: " + e.what());
  }
}

[[noreturn]] void throw_field_errors(const char* what, const std::vector<std::string>& errors) {
  std::string msg = std::string(what) + ":";
  for (const auto& e : errors) msg += "\n  " + e;
  throw InvalidParameter(msg);
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::vector<double> ExperimentConfig::error_grid() const {
  if (!velocity_errors.empty()) return velocity_errors;
  std::vector<double> grid;
  for (int i = 0; i <= 20; ++i) grid.push_back(0.05 * i);
  return grid;
}

std::vector<std::string> RunConfig::validation_errors() const {
  std::vector<std::string> errs = reward.validation_errors();
  for (auto& e : errs) e = "reward." + e;
  for (auto& e : sim.validation_errors()) errs.push_back(e);
  for (auto& e : train.validation_errors()) errs.push_back(e);
  if (track.empty()) errs.emplace_back("track must name a track file");
  if (!(half_width > 0.0)) errs.emplace_back("half_width must be > 0");
  for (double a : experiments.velocity_alphas) {
    if (!(a > 0.0)) {
      errs.emplace_back("experiments.velocity_alphas entries must be > 0");
      break;
    }
  }
  if (!(experiments.scatter_alpha > 0.0)) errs.emplace_back("experiments.scatter_alpha must be > 0");
  if (experiments.scatter_samples == 0) errs.emplace_back("experiments.scatter_samples must be > 0");
  if (!(experiments.progress_epsilon > 0.0)) errs.emplace_back("experiments.progress_epsilon must be > 0");
  if (experiments.progress_trace.period == 0) errs.emplace_back("experiments.progress_trace.period must be > 0");
  if (!(experiments.steering_k > 0.0)) errs.emplace_back("experiments.steering_k must be > 0");
  if (!(experiments.weighted.k > 0.0)) errs.emplace_back("experiments.weighted.k must be > 0");
  if (!(experiments.weighted.gamma > 0.0)) errs.emplace_back("experiments.weighted.gamma must be > 0");
  if (experiments.weighted.block_length == 0) errs.emplace_back("experiments.weighted.block_length must be > 0");
  const auto& p = experiments.ablation.preset;
  if (p != "progress-regularization" && p != "steering-weighting" && p != "steering-weight") {
    errs.emplace_back(
        "experiments.ablation.preset must be one of: progress-regularization, steering-weighting, steering-weight");
  }
  if (experiments.ablation.eval_episodes == 0) errs.emplace_back("experiments.ablation.eval_episodes must be > 0");
  if (!(experiments.ablation.spike_factor > 0.0)) errs.emplace_back("experiments.ablation.spike_factor must be > 0");
  return errs;
}

void RunConfig::validate() const {
  const auto errs = validation_errors();
  if (!errs.empty()) throw_field_errors("invalid run config", errs);
}

std::string to_json(const RunConfig& config) { return dump(run_json(config)); }

RunConfig parse_run_config(std::string_view text) {
  Json j = parse_json(text, "run config");
  if (j.is_object() && j.contains("manifest_version")) {
    if (!j.contains("config")) throw InvalidParameter("manifest has no `config` section");
    j = Json(j["config"]);
  }
  if (!j.is_object()) throw InvalidParameter("run config: expected a JSON object");
  RunConfig c;
  std::vector<std::string> errors;
  ObjectReader r(&j, "", &errors);
  r.text("track", c.track);
  r.number("half_width", c.half_width);
  r.seed("seed", c.seed);
  r.text("output_dir", c.output_dir);
  read_sim(r.child("sim"), c.sim);
  read_reward(r.child("reward"), c.reward);
  read_train(r.child("train"), c.train);
  read_experiments(r.child("experiments"), c.experiments);
  r.finish();
  if (!errors.empty()) throw_field_errors("invalid run config", errors);
  c.train.master_seed = c.seed;
  c.validate();
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) { return parse_run_config(read_text_file(path)); }

namespace {

const std::pair<const char*, const char*> kFieldDocs[] = {
    {"track", "Track CSV (header x,y; one waypoint per row, meters; loop closure implicit)."},
    {"half_width", "Track half-width in meters."},
    {"seed", "Master seed; every random stream derives from it. --seed overrides."},
    {"output_dir", "Runs are written to <output_dir>/<run-id>/."},
    {"sim", "Kinematic bicycle simulator."},
    {"dt", "Time step, seconds (15 Hz default)."},
    {"wheelbase", "Wheelbase, meters."},
    {"max_accel", "Speed tracking limit, m/s^2."},
    {"max_steps", "Episode step cap."},
    {"off_track_tolerance", "Off track when |lateral offset| > half_width + this, meters."},
    {"speed_min", "Lowest target speed, m/s."},
    {"speed_max", "Highest target speed, m/s."},
    {"steering_limit", "Steering range is [-limit, +limit] degrees."},
    {"random_start", "Start episodes at a seeded random arc offset instead of s = 0."},
    {"reward", "Reward family parameters."},
    {"velocity", "Velocity reward exp(-alpha_v * |v_target - v|)."},
    {"alpha_v", "Decay steepness."},
    {"v_target", "Target speed, m/s."},
    {"progress", "Progress reward dProgress / (dL [+ epsilon])."},
    {"mode", "unregularized | fixed_epsilon | adaptive_epsilon | decaying_epsilon."},
    {"epsilon", "Fixed regularizer, meters."},
    {"alpha_eps", "Adaptive regularizer epsilon = alpha_eps * mean(dL)."},
    {"epsilon0", "Decaying regularizer initial value, meters."},
    {"beta", "Decaying regularizer rate per step: epsilon0 * exp(-beta t)."},
    {"steering", "Steering-change penalty -k |dtheta| (1 - w_curve) v_scale."},
    {"k", "Penalty per degree of steering change."},
    {"weighting", "none | min (min(gamma kappa, 1)) | rational (kappa / (kappa + gamma))."},
    {"gamma_mode", "fixed | adaptive (gamma = alpha_gamma * mean curvature)."},
    {"gamma", "Fixed gamma."},
    {"alpha_gamma", "Adaptive gamma scale, > 1."},
    {"v_scale", "Speed-dependent scale; 1 at low speed."},
    {"curvature_window", "Arc window (m) for the mean curvature used by adaptive gamma."},
    {"composite", "Weights of the composite reward per segment class."},
    {"straight", "Weights on straight segments."},
    {"curved", "Weights on curved segments."},
    {"w_progress", "Progress weight."},
    {"w_steer", "Steering penalty weight."},
    {"w_velocity", "Velocity reward weight."},
    {"curvature_threshold", "Curved iff curvature >= threshold (1/m)."},
    {"train", "Cross-entropy method trainer."},
    {"population_size", "Candidates per iteration (>= 4)."},
    {"elite_fraction", "Fraction kept as elites, (0, 1]."},
    {"noise_std_init", "Initial sampling std of policy weights."},
    {"noise_decay", "Std multiplier per iteration, (0, 1]; floor 1e-3."},
    {"iterations", "CEM iterations."},
    {"episodes_per_candidate", "Seeded rollouts per candidate (shared across the population)."},
    {"lookaheads", "Arc distances (m) ahead of the vehicle for curvature features."},
    {"experiments", "Parameters of `trackforge experiment`."},
    {"velocity_alphas", "velocity-sweep: alpha values."},
    {"velocity_errors", "velocity-sweep: |v_target - v| grid; empty = 0..1 step 0.05."},
    {"scatter_alpha", "velocity-scatter: alpha."},
    {"scatter_samples", "velocity-scatter: sample count."},
    {"progress_epsilon", "progress-compare: epsilon of the regularized column."},
    {"progress_trace", "progress-compare: synthetic sinusoidal dL generator."},
    {"steps", "Number of generated steps."},
    {"period", "Sinusoid period, steps."},
    {"dl_peak", "Largest dL, meters."},
    {"dl_floor", "dL at the dips, meters."},
    {"d_progress", "Constant progress increment per step."},
    {"jitter", "Relative uniform jitter of dL."},
    {"steering_k", "steering-compare: penalty per degree."},
    {"steering_steps", "steering-compare: number of steps."},
    {"weighted", "steering-weighted: alternating straight/arc curvature profile."},
    {"form", "Curvature weighting form: min | rational."},
    {"arc_curvature", "Curvature of arc blocks, 1/m."},
    {"block_length", "Steps per straight or arc block."},
    {"abrupt_range", "Steering changes drawn from U[-range, range] degrees."},
    {"ablation", "ablation: trains one policy per variant and compares them."},
    {"preset", "progress-regularization | steering-weighting | steering-weight."},
    {"eval_episodes", "Held-out evaluation episodes per trained policy."},
    {"train_seeds", "Training seeds; each variant is trained once per seed."},
    {"spike_factor", "Reward spike: |r_progress| > factor * median over the trace."},
};

const char* field_doc(const std::string& key) {
  for (const auto& [k, d] : kFieldDocs) {
    if (key == k) return d;
  }
  return nullptr;
}

}  // namespace

std::string commented_config_template(const RunConfig& config) {
  // Annotate the canonical dump line by line; every key line gets its doc.
  std::istringstream in(to_json(config));
  std::ostringstream out;
  out << "// trackforge run configuration. Strip the comments (or keep them:\n"
         "// the loader accepts // comments) and pass with --config.\n";
  std::string line;
  while (std::getline(in, line)) {
    const auto q1 = line.find('"');
    const auto q2 = q1 == std::string::npos ? q1 : line.find('"', q1 + 1);
    if (q2 != std::string::npos && line.find("\":", q1) == q2) {
      const std::string key = line.substr(q1 + 1, q2 - q1 - 1);
      if (const char* doc = field_doc(key)) out << std::string(q1, ' ') << "// " << doc << '\n';
    }
    out << line << '\n';
  }
  return out.str();
}

std::string reward_config_to_json(const RewardConfig& config) { return dump(reward_json(config)); }

RewardConfig parse_reward_config(std::string_view text) {
  const Json j = parse_json(text, "reward config");
  if (!j.is_object()) throw InvalidParameter("reward config: expected a JSON object");
  RewardConfig c;
  std::vector<std::string> errors;
  read_reward(ObjectReader(&j, "", &errors), c);
  if (!errors.empty()) throw_field_errors("invalid reward config", errors);
  c.validate();
  return c;
}

std::string to_json(const PolicyCheckpoint& cp) {
  Json j;
  j["format"] = "trackforge-policy";
  j["version"] = 1;
  j["master_seed"] = cp.master_seed;
  j["features"] = {{"lookaheads", cp.policy.lookaheads},
                   {"layout", {"lateral_offset", "heading_error", "speed", "curvature_ahead...", "bias"}}};
  j["weights"] = {{"rows", 2}, {"cols", feature_dimension(cp.policy.lookaheads.size())}, {"data", cp.policy.weights}};
  j["action_bounds"] = {{"speed_min", cp.bounds.speed_min},
                        {"speed_max", cp.bounds.speed_max},
                        {"steering_limit", cp.bounds.steering_limit}};
  return dump(j);
}

PolicyCheckpoint parse_policy_checkpoint(std::string_view text) {
  const Json j = parse_json(text, "policy checkpoint");
  if (!j.is_object()) throw InvalidParameter("policy checkpoint: expected a JSON object");
  std::vector<std::string> errors;
  PolicyCheckpoint cp;
  ObjectReader r(&j, "", &errors);
  std::string format;
  r.text("format", format);
  if (format != "trackforge-policy") errors.emplace_back("format: expected \"trackforge-policy\"");
  std::size_t version = 0;
  r.count("version", version);
  if (version != 1) errors.emplace_back("version: unsupported checkpoint version");
  r.seed("master_seed", cp.master_seed);
  {
    auto f = r.child("features");
    f.numbers("lookaheads", cp.policy.lookaheads);
    f.ignore("layout");
    f.finish();
  }
  std::size_t rows = 0;
  std::size_t cols = 0;
  {
    auto w = r.child("weights");
    w.count("rows", rows);
    w.count("cols", cols);
    w.numbers("data", cp.policy.weights);
    w.finish();
  }
  {
    auto b = r.child("action_bounds");
    b.number("speed_min", cp.bounds.speed_min);
    b.number("speed_max", cp.bounds.speed_max);
    b.number("steering_limit", cp.bounds.steering_limit);
    b.finish();
  }
  r.finish();
  if (errors.empty()) {
    if (rows != 2) errors.emplace_back("weights.rows: expected 2");
    if (cols != feature_dimension(cp.policy.lookaheads.size())) {
      errors.emplace_back("weights.cols: expected " + std::to_string(feature_dimension(cp.policy.lookaheads.size())) + " for " +
                          std::to_string(cp.policy.lookaheads.size()) + " lookaheads");
    }
    if (cp.policy.weights.size() != 2 * feature_dimension(cp.policy.lookaheads.size())) {
      errors.emplace_back("weights.data: expected " + std::to_string(2 * feature_dimension(cp.policy.lookaheads.size())) + " values");
    }
    for (double w : cp.policy.weights) {
      if (!std::isfinite(w)) {
        errors.emplace_back("weights.data: non-finite weight");
        break;
      }
    }
  }
  if (!errors.empty()) throw_field_errors("invalid policy checkpoint", errors);
  return cp;
}

PolicyCheckpoint load_policy_checkpoint(const std::filesystem::path& path) {
  try {
    return parse_policy_checkpoint(read_text_file(path));
  } catch (const InvalidParameter& e) {
    throw InvalidParameter(path.string() + ": " + e.what());
  }
}

TrackModel load_track_spec(const std::string& spec, double half_width) {
  if (spec == "builtin:oval") return TrackModel(shapes::oval(), half_width);
  if (spec == "builtin:slow-corner") return TrackModel(shapes::slow_corner(), half_width);
  if (spec.starts_with("builtin:")) {
    throw InvalidParameter("unknown builtin track " + spec + " (valid: builtin:oval, builtin:slow-corner)");
  }
  return load_track(spec, half_width);
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

const char* library_version() { return TRACKFORGE_VERSION; }

}  // namespace trackforge
