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

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "trackforge/config.hpp"
#include "trackforge/dynamics.hpp"
#include "trackforge/errors.hpp"
#include "trackforge/experiments.hpp"
#include "trackforge/policy.hpp"
#include "trackforge/rewards.hpp"
#include "trackforge/rollout.hpp"
#include "trackforge/track.hpp"
#include "trackforge/training.hpp"

namespace py = pybind11;
using namespace trackforge;

namespace {

std::vector<Waypoint> to_waypoints(const std::vector<std::pair<double, double>>& pts) {
  std::vector<Waypoint> out;
  out.reserve(pts.size());
  for (const auto& [x, y] : pts) out.push_back({x, y});
  return out;
}

std::vector<std::pair<double, double>> from_waypoints(const std::vector<Waypoint>& pts) {
  std::vector<std::pair<double, double>> out;
  out.reserve(pts.size());
  for (const auto& p : pts) out.emplace_back(p.x, p.y);
  return out;
}

RunConfig config_from(const std::optional<std::string>& json) {
  if (!json) return RunConfig{};
  return parse_run_config(*json);
}

Policy policy_from(const RunConfig& c, const std::optional<std::string>& checkpoint) {
  if (!checkpoint) return Policy::zeros(c.train.lookaheads);
  return parse_policy_checkpoint(*checkpoint).policy;
}

py::dict metrics_dict(const EpisodeMetrics& m) {
  py::dict d;
  d["seed"] = m.seed;
  d["return"] = m.episode_return;
  d["completed"] = m.completed;
  d["steps"] = m.steps;
  d["smoothness"] = m.smoothness;
  d["mean_speed"] = m.mean_speed;
  d["termination"] = to_string(m.termination);
  return d;
}

py::list stats_list(const std::vector<IterationStats>& stats) {
  py::list out;
  for (const auto& s : stats) {
    py::dict d;
    d["iteration"] = s.iteration;
    d["mean_return"] = s.mean_return;
    d["elite_mean_return"] = s.elite_mean_return;
    d["best_so_far"] = s.best_so_far;
    d["noise_std"] = s.noise_std;
    out.append(d);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Track simulator, reward shaping and CEM policy search";
  m.attr("__version__") = library_version();

  py::register_exception<ContractViolation>(m, "ContractViolation", PyExc_ValueError);
  py::register_exception<InvalidParameter>(m, "InvalidParameter", PyExc_ValueError);
  py::register_exception<UndefinedReward>(m, "UndefinedReward", PyExc_ArithmeticError);
  py::register_exception<LoadError>(m, "LoadError", PyExc_OSError);

  py::enum_<SegmentClass>(m, "SegmentClass")
      .value("STRAIGHT", SegmentClass::Straight)
      .value("CURVED", SegmentClass::Curved);

  py::class_<TrackModel>(m, "Track")
      .def(py::init([](const std::vector<std::pair<double, double>>& pts, double half_width) {
             return TrackModel(to_waypoints(pts), half_width);
           }),
           py::arg("waypoints"), py::arg("half_width"))
      .def_static(
          "load", [](const std::string& spec, double half_width) { return load_track_spec(spec, half_width); },
          py::arg("spec"), py::arg("half_width") = 0.6)
      .def_property_readonly("waypoints", [](const TrackModel& t) { return from_waypoints(t.waypoints()); })
      .def_property_readonly("half_width", &TrackModel::half_width)
      .def_property_readonly("total_length", &TrackModel::total_length)
      .def_property_readonly("curvature_samples", &TrackModel::curvature_samples)
      .def("__len__", &TrackModel::size)
      .def(
          "project",
          [](const TrackModel& t, double x, double y) {
            const Projection p = t.project({x, y});
            return py::make_tuple(p.s, p.lateral_offset, p.segment_index);
          },
          py::arg("x"), py::arg("y"))
      .def(
          "point_at",
          [](const TrackModel& t, double s) {
            const Vec2 p = t.point_at(s);
            return py::make_tuple(p.x, p.y);
          },
          py::arg("s"))
      .def("progress_at", &TrackModel::progress_at, py::arg("s"))
      .def("curvature_at", &TrackModel::curvature_at, py::arg("s"))
      .def("mean_curvature", &TrackModel::mean_curvature, py::arg("s_center"), py::arg("window"))
      .def("classify_segment", &TrackModel::classify_segment, py::arg("s"), py::arg("threshold"));

  m.def(
      "menger_curvature",
      [](std::pair<double, double> a, std::pair<double, double> b, std::pair<double, double> c) {
        return menger_curvature({a.first, a.second}, {b.first, b.second}, {c.first, c.second});
      },
      py::arg("prev"), py::arg("mid"), py::arg("next"));

  py::class_<VehicleState>(m, "VehicleState")
      .def(py::init<double, double, double, double>(), py::arg("x") = 0.0, py::arg("y") = 0.0,
           py::arg("heading") = 0.0, py::arg("speed") = 0.0)
      .def_readwrite("x", &VehicleState::x)
      .def_readwrite("y", &VehicleState::y)
      .def_readwrite("heading", &VehicleState::heading)
      .def_readwrite("speed", &VehicleState::speed)
      .def("__repr__", [](const VehicleState& s) {
        return "VehicleState(x=" + std::to_string(s.x) + ", y=" + std::to_string(s.y) +
               ", heading=" + std::to_string(s.heading) + ", speed=" + std::to_string(s.speed) + ")";
      });

  py::class_<SimParams>(m, "SimParams")
      .def(py::init<>())
      .def_readwrite("dt", &SimParams::dt)
      .def_readwrite("wheelbase", &SimParams::wheelbase)
      .def_readwrite("max_accel", &SimParams::max_accel)
      .def_readwrite("max_steps", &SimParams::max_steps)
      .def_readwrite("off_track_tolerance", &SimParams::off_track_tolerance)
      .def_readwrite("random_start", &SimParams::random_start)
      .def_property(
          "speed_min", [](const SimParams& p) { return p.bounds.speed_min; },
          [](SimParams& p, double v) { p.bounds.speed_min = v; })
      .def_property(
          "speed_max", [](const SimParams& p) { return p.bounds.speed_max; },
          [](SimParams& p, double v) { p.bounds.speed_max = v; })
      .def_property(
          "steering_limit", [](const SimParams& p) { return p.bounds.steering_limit; },
          [](SimParams& p, double v) { p.bounds.steering_limit = v; })
      .def("validate", &SimParams::validate);

  m.def("normalize_angle", &normalize_angle, py::arg("angle"));
  m.def(
      "step",
      [](const VehicleState& s, double target_speed, double steering_deg, const SimParams& p) {
        return step(s, Action{target_speed, steering_deg}, p);
      },
      py::arg("state"), py::arg("target_speed"), py::arg("steering_deg"), py::arg("params") = SimParams{});

  m.def(
      "velocity_reward",
      [](double v, double alpha, double v_target) { return velocity_reward(v, {alpha, v_target}); },
      py::arg("v_actual"), py::arg("alpha") = 3.0, py::arg("v_target") = 1.0);
  m.def("progress_reward_raw", &progress_reward_raw, py::arg("d_progress"), py::arg("d_l"));
  m.def("progress_reward_regularized", &progress_reward_regularized, py::arg("d_progress"), py::arg("d_l"),
        py::arg("epsilon"));
  m.def("epsilon_adaptive", &epsilon_adaptive, py::arg("mean_dl"), py::arg("alpha_eps"));
  m.def("epsilon_decayed", &epsilon_decayed, py::arg("epsilon0"), py::arg("beta"), py::arg("t"));
  m.def("steering_penalty", &steering_penalty, py::arg("d_steer"), py::arg("k"));
  m.def("steering_penalty_weighted", &steering_penalty_weighted, py::arg("d_steer"), py::arg("k"),
        py::arg("w_curve"), py::arg("v_scale") = 1.0);
  m.def("curve_weight_min", &curve_weight_min, py::arg("curvature"), py::arg("gamma"));
  m.def("curve_weight_rational", &curve_weight_rational, py::arg("curvature"), py::arg("gamma"));
  m.def("gamma_adaptive", &gamma_adaptive, py::arg("mean_curvature"), py::arg("alpha_gamma"));

  m.def("default_config", []() { return to_json(RunConfig{}); });
  m.def(
      "normalize_config", [](const std::string& json) { return to_json(parse_run_config(json)); },
      py::arg("config_json"));
  m.def(
      "config_template", [](const std::optional<std::string>& json) {
        return commented_config_template(config_from(json));
      },
      py::arg("config_json") = py::none());

  m.def(
      "simulate",
      [](const std::optional<std::string>& config, const std::optional<std::string>& checkpoint,
         std::uint64_t seed) {
        const RunConfig c = config_from(config);
        const TrackModel track = load_track_spec(c.track, c.half_width);
        const Policy policy = policy_from(c, checkpoint);
        EpisodeTrace trace;
        {
          py::gil_scoped_release release;
          trace = rollout(policy, track, c.reward, c.sim, seed);
        }
        py::dict d = metrics_dict(episode_metrics(trace, seed));
        d["trace_csv"] = trace_to_csv(trace);
        return d;
      },
      py::arg("config_json") = py::none(), py::arg("checkpoint_json") = py::none(), py::arg("seed") = 0);

  m.def(
      "train",
      [](const std::optional<std::string>& config) {
        const RunConfig c = config_from(config);
        const TrackModel track = load_track_spec(c.track, c.half_width);
        TrainResult r;
        {
          py::gil_scoped_release release;
          r = train_cem(track, c.reward, c.sim, c.train);
        }
        py::dict d;
        d["checkpoint_json"] = to_json(PolicyCheckpoint{r.best_policy, c.sim.bounds, c.seed});
        d["best_return"] = r.best_return;
        d["total_episodes"] = r.total_episodes;
        d["stats"] = stats_list(r.stats);
        return d;
      },
      py::arg("config_json") = py::none());

  m.def(
      "evaluate",
      [](const std::string& checkpoint, const std::optional<std::string>& config, std::size_t episodes) {
        const RunConfig c = config_from(config);
        const TrackModel track = load_track_spec(c.track, c.half_width);
        const Policy policy = policy_from(c, checkpoint);
        const auto seeds = heldout_seeds(c.seed, episodes);
        EvaluationResult r;
        {
          py::gil_scoped_release release;
          r = evaluate_policy(policy, track, c.reward, c.sim, seeds);
        }
        py::list eps;
        for (const auto& e : r.episodes) eps.append(metrics_dict(e));
        py::dict d;
        d["mean_return"] = r.mean_return;
        d["episodes"] = eps;
        return d;
      },
      py::arg("checkpoint_json"), py::arg("config_json") = py::none(), py::arg("episodes") = 10);

  m.def(
      "cem_maximize",
      [](std::size_t dim, const std::function<double(std::vector<double>)>& f, std::size_t population,
         std::size_t iterations, double noise_std, double noise_decay, double elite_fraction, std::uint64_t seed) {
        TrainConfig c;
        c.population_size = population;
        c.iterations = iterations;
        c.noise_std_init = noise_std;
        c.noise_decay = noise_decay;
        c.elite_fraction = elite_fraction;
        c.master_seed = seed;
        const CemResult r = cem_maximize(
            dim, [&](std::span<const double> x, std::size_t) { return f({x.begin(), x.end()}); }, c);
        py::dict d;
        d["best"] = r.best;
        d["best_value"] = r.best_value;
        d["final_mean"] = r.final_mean;
        d["evaluations"] = r.evaluations;
        d["stats"] = stats_list(r.stats);
        return d;
      },
      py::arg("dim"), py::arg("objective"), py::arg("population") = 32, py::arg("iterations") = 40,
      py::arg("noise_std") = 0.5, py::arg("noise_decay") = 0.95, py::arg("elite_fraction") = 0.25,
      py::arg("seed") = 0);

  m.def(
      "velocity_sweep_csv",
      [](const std::optional<std::string>& config) {
        const ExperimentConfig e = config_from(config).experiments;
        const auto errors = e.error_grid();
        return sweep_velocity_reward(e.velocity_alphas, errors).to_csv();
      },
      py::arg("config_json") = py::none());
  m.def(
      "progress_compare_csv",
      [](const std::optional<std::string>& config) {
        const ExperimentConfig e = config_from(config).experiments;
        return compare_progress_rewards(e.progress_trace, e.progress_epsilon).to_csv();
      },
      py::arg("config_json") = py::none());
  m.def(
      "steering_weighted_csv",
      [](const std::optional<std::string>& config) {
        return compare_weighted_steering(config_from(config).experiments.weighted).to_csv();
      },
      py::arg("config_json") = py::none());
  m.def("heldout_seeds", &heldout_seeds, py::arg("master_seed"), py::arg("n"));
}
