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

#include "trackforge/rollout.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "trackforge/errors.hpp"
#include "trackforge/util.hpp"

namespace trackforge {

const char* to_string(Termination reason) {
  switch (reason) {
    case Termination::Completed: return "Completed";
    case Termination::OffTrack: return "OffTrack";
    case Termination::MaxSteps: return "MaxSteps";
  }
  return "?";
}

Termination termination_from_string(std::string_view name) {
  if (name == "Completed") return Termination::Completed;
  if (name == "OffTrack") return Termination::OffTrack;
  if (name == "MaxSteps") return Termination::MaxSteps;
  throw LoadError("unknown termination reason `" + std::string(name) + "`");
}

double EpisodeTrace::total_reward() const {
  double sum = 0.0;
  for (const auto& r : steps) sum += r.reward.total;
  return sum;
}

double EpisodeTrace::cumulative_progress() const {
  double sum = 0.0;
  for (const auto& r : steps) sum += r.d_progress;
  return sum;
}

VehicleState start_state(const TrackModel& track, const SimParams& params, std::uint64_t seed) {
  double s0 = 0.0;
  if (params.random_start) {
    std::mt19937_64 rng(mix_seed(seed, 0));
    s0 = track.wrap_s(std::uniform_real_distribution<double>(0.0, track.total_length())(rng));
  }
  const Vec2 p = track.point_at(s0);
  return {p.x, p.y, track.tangent_heading_at(s0), 0.0};
}

EpisodeTrace rollout(const Policy& policy, const TrackModel& track, const RewardConfig& reward_config,
                     const SimParams& params, std::uint64_t seed) {
  EpisodeTrace trace;
  trace.steps.reserve(params.max_steps);

  VehicleState state = start_state(track, params, seed);
  Projection proj = track.project({state.x, state.y});
  double progress = track.progress_at(proj.s);
  double lap = 0.0;
  double prev_steer = 0.0;
  double sum_dl = 0.0;

  for (std::size_t t = 0; t < params.max_steps; ++t) {
    const FeatureVector features = featurize(track, state, proj, policy.lookaheads);
    const Action action = act(policy, features, params.bounds);
    const VehicleState next = step(state, action, params);
    const Projection next_proj = track.project({next.x, next.y});

    const double next_progress = track.progress_at(next_proj.s);
    double dp = next_progress - progress;
    if (dp > 0.5) dp -= 1.0;
    if (dp <= -0.5) dp += 1.0;
    const double dl = std::hypot(next.x - state.x, next.y - state.y);
    sum_dl += dl;

    RewardContext ctx;
    ctx.d_progress = dp;
    ctx.d_l = dl;
    ctx.d_steer = action.steering_angle - prev_steer;
    ctx.v_actual = next.speed;
    ctx.curvature = track.curvature_at(next_proj.s);
    ctx.mean_dl = sum_dl / static_cast<double>(t + 1);
    ctx.mean_curvature = track.mean_curvature(next_proj.s, reward_config.steering.curvature_window);
    ctx.t = static_cast<long long>(t);

    const SegmentClass segment =
        track.classify_segment(next_proj.s, reward_config.composite.curvature_threshold);
    const RewardComponents reward =
        composite_reward(ctx, segment_weights(reward_config.composite, segment), reward_config);

    trace.steps.push_back(StepRecord{t, next, action, next_proj.s, dp, dl, ctx.d_steer,
                                     ctx.curvature, reward});

    state = next;
    proj = next_proj;
    progress = next_progress;
    prev_steer = action.steering_angle;
    lap += dp;

    if (off_track(next_proj.lateral_offset, track.half_width(), params)) {
      trace.termination = Termination::OffTrack;
      return trace;
    }
    if (lap >= 1.0) {
      trace.termination = Termination::Completed;
      return trace;
    }
  }
  trace.termination = Termination::MaxSteps;
  return trace;
}

void write_trace_csv(std::ostream& out, const EpisodeTrace& trace) {
  out << kTraceCsvHeader << '\n';
  for (const auto& r : trace.steps) {
    const double cols[] = {r.state.x,      r.state.y,         r.state.heading,  r.state.speed,
                           r.action.target_speed, r.action.steering_angle, r.s, r.d_progress,
                           r.d_l,          r.d_steer,         r.curvature,      r.reward.velocity,
                           r.reward.progress, r.reward.steer, r.reward.total};
    out << r.t;
    for (double c : cols) out << ',' << format_double(c);
    out << '\n';
  }
  out << "# terminated=" << to_string(trace.termination) << '\n';
}

std::string trace_to_csv(const EpisodeTrace& trace) {
  std::ostringstream out;
  write_trace_csv(out, trace);
  return out.str();
}

void save_trace_csv(const std::filesystem::path& path, const EpisodeTrace& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write trace " + path.string());
  write_trace_csv(out, trace);
}

EpisodeTrace parse_trace_csv(std::string_view text) {
  EpisodeTrace trace;
  bool header = false;
  bool terminated = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t eol = std::min(text.find('\n', pos), text.size());
    const std::string_view line = trim(text.substr(pos, eol - pos));
    pos = eol + 1;
    ++line_no;
    if (line.empty()) continue;
    const std::string where = "trace line " + std::to_string(line_no) + ": ";
    if (line.front() == '#') {
      constexpr std::string_view key = "# terminated=";
      if (line.starts_with(key)) {
        trace.termination = termination_from_string(line.substr(key.size()));
        terminated = true;
      }
      continue;
    }
    if (!header) {
      if (line != kTraceCsvHeader) throw LoadError(where + "unexpected header");
      header = true;
      continue;
    }
    std::vector<double> v;
    std::size_t start = 0;
    while (start <= line.size()) {
      const std::size_t comma = std::min(line.find(',', start), line.size());
      const auto num = parse_double(line.substr(start, comma - start));
      if (!num) throw LoadError(where + "malformed number");
      v.push_back(*num);
      start = comma + 1;
    }
    if (v.size() != 16) throw LoadError(where + "expected 16 columns");
    StepRecord r;
    r.t = static_cast<std::size_t>(v[0]);
    r.state = {v[1], v[2], v[3], v[4]};
    r.action = {v[5], v[6]};
    r.s = v[7];
    r.d_progress = v[8];
    r.d_l = v[9];
    r.d_steer = v[10];
    r.curvature = v[11];
    r.reward.velocity = v[12];
    r.reward.progress = v[13];
    r.reward.steer = v[14];
    r.reward.total = v[15];
    trace.steps.push_back(r);
  }
  if (!header) throw LoadError("trace: missing header");
  if (!terminated) throw LoadError("trace: missing `# terminated=` line");
  return trace;
}

EpisodeTrace load_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open trace " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_trace_csv(buf.str());
}

}  // namespace trackforge
