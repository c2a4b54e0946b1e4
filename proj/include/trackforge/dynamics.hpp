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

#include <cstddef>
#include <string>
#include <vector>

#include "trackforge/track.hpp"

namespace trackforge {

struct VehicleState {
  double x{};
  double y{};
  double heading{};  // radians, (-pi, pi]
  double speed{};    // m/s, >= 0
};

struct Action {
  double target_speed{};    // m/s
  double steering_angle{};  // degrees
};

struct ActionBounds {
  double speed_min = 0.1;
  double speed_max = 1.0;
  double steering_limit = 30.0;  // degrees, symmetric
};

struct SimParams {
  double dt = 0.0667;
  double wheelbase = 0.16;
  double max_accel = 2.0;
  std::size_t max_steps = 1000;
  double off_track_tolerance = 0.05;
  ActionBounds bounds;
  // Start each episode at a seeded uniform arc offset instead of s = 0.
  bool random_start = false;

  std::vector<std::string> validation_errors() const;
  void validate() const;
};

// Wraps an angle into (-pi, pi].
double normalize_angle(double a);

bool action_in_bounds(const Action& action, const ActionBounds& bounds);

// Kinematic bicycle update with first-order accel-limited speed tracking.
// Position advances with the updated speed along the pre-step heading.
VehicleState step(const VehicleState& state, const Action& action, const SimParams& params);

bool off_track(const TrackModel& track, const VehicleState& state, const SimParams& params);
bool off_track(double lateral_offset, double half_width, const SimParams& params);

}  // namespace trackforge
