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

#include "trackforge/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "trackforge/errors.hpp"

namespace trackforge {

double normalize_angle(double a) {
  double r = std::remainder(a, 2.0 * std::numbers::pi);
  if (r <= -std::numbers::pi) r += 2.0 * std::numbers::pi;
  return r;
}

bool action_in_bounds(const Action& action, const ActionBounds& bounds) {
  return std::isfinite(action.target_speed) && std::isfinite(action.steering_angle) &&
         action.target_speed >= bounds.speed_min && action.target_speed <= bounds.speed_max &&
         std::abs(action.steering_angle) <= bounds.steering_limit;
}

VehicleState step(const VehicleState& state, const Action& action, const SimParams& params) {
  if (!action_in_bounds(action, params.bounds)) {
    throw ContractViolation("step: action outside configured bounds");
  }
  const double dv_max = params.max_accel * params.dt;
  const double dv = std::clamp(action.target_speed - state.speed, -dv_max, dv_max);
  const double v = std::max(0.0, state.speed + dv);
  const double delta = action.steering_angle * std::numbers::pi / 180.0;

  VehicleState next;
  next.speed = v;
  next.x = state.x + v * std::cos(state.heading) * params.dt;
  next.y = state.y + v * std::sin(state.heading) * params.dt;
  next.heading = action.steering_angle == 0.0
                     ? state.heading
                     : normalize_angle(state.heading + v / params.wheelbase * std::tan(delta) * params.dt);
  return next;
}

bool off_track(double lateral_offset, double half_width, const SimParams& params) {
  return std::abs(lateral_offset) > half_width + params.off_track_tolerance;
}

bool off_track(const TrackModel& track, const VehicleState& state, const SimParams& params) {
  return off_track(track.project({state.x, state.y}).lateral_offset, track.half_width(), params);
}

std::vector<std::string> SimParams::validation_errors() const {
  std::vector<std::string> errs;
  const auto need = [&](bool ok, const char* msg) {
    if (!ok) errs.emplace_back(msg);
  };
  const auto finite_pos = [](double v) { return std::isfinite(v) && v > 0.0; };
  need(finite_pos(dt), "sim.dt must be > 0");
  need(finite_pos(wheelbase), "sim.wheelbase must be > 0");
  need(finite_pos(max_accel), "sim.max_accel must be > 0");
  need(std::isfinite(off_track_tolerance) && off_track_tolerance >= 0.0,
       "sim.off_track_tolerance must be >= 0");
  need(std::isfinite(bounds.speed_min) && bounds.speed_min >= 0.0, "sim.speed_min must be >= 0");
  need(std::isfinite(bounds.speed_max) && bounds.speed_max > bounds.speed_min,
       "sim.speed_max must exceed sim.speed_min");
  need(std::isfinite(bounds.steering_limit) && bounds.steering_limit > 0.0 &&
           bounds.steering_limit < 90.0,
       "sim.steering_limit must be in (0, 90) degrees");
  return errs;
}

void SimParams::validate() const {
  const auto errs = validation_errors();
  if (errs.empty()) return;
  std::string msg = "invalid sim params:";
  for (const auto& e : errs) msg += "\n  " + e;
  throw InvalidParameter(msg);
}

}  // namespace trackforge
