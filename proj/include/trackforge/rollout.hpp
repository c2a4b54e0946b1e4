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

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "trackforge/dynamics.hpp"
#include "trackforge/policy.hpp"
#include "trackforge/rewards.hpp"
#include "trackforge/track.hpp"

namespace trackforge {

enum class Termination { Completed, OffTrack, MaxSteps };

const char* to_string(Termination reason);
Termination termination_from_string(std::string_view name);

struct StepRecord {
  std::size_t t{};
  VehicleState state;  // after the step
  Action action;
  double s{};           // arc coordinate after the step
  double d_progress{};  // wrapped lap-fraction difference
  double d_l{};         // m travelled this step
  double d_steer{};     // degrees, relative to the previous command
  double curvature{};   // 1/m at s
  RewardComponents reward;
};

struct EpisodeTrace {
  std::vector<StepRecord> steps;
  Termination termination = Termination::MaxSteps;

  double total_reward() const;
  double cumulative_progress() const;
};

// Start pose: centered on the track at s (0 unless random starts are on),
// tangent heading, zero speed.
VehicleState start_state(const TrackModel& track, const SimParams& params, std::uint64_t seed);

EpisodeTrace rollout(const Policy& policy, const TrackModel& track, const RewardConfig& reward_config,
                     const SimParams& params, std::uint64_t seed);

inline constexpr const char* kTraceCsvHeader =
    "t,x,y,heading,speed,target_speed,steering,s,dprogress,dl,dsteer,curvature,"
    "r_velocity,r_progress,r_steer,r_total";

void write_trace_csv(std::ostream& out, const EpisodeTrace& trace);
std::string trace_to_csv(const EpisodeTrace& trace);
void save_trace_csv(const std::filesystem::path& path, const EpisodeTrace& trace);
EpisodeTrace parse_trace_csv(std::string_view text);
EpisodeTrace load_trace_csv(const std::filesystem::path& path);

}  // namespace trackforge
