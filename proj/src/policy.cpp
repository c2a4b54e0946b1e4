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

#include "trackforge/policy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "trackforge/errors.hpp"

namespace trackforge {

FeatureVector featurize(const TrackModel& track, const VehicleState& state,
                        std::span<const double> lookaheads) {
  return featurize(track, state, track.project({state.x, state.y}), lookaheads);
}

FeatureVector featurize(const TrackModel& track, const VehicleState& state,
                        const Projection& projection, std::span<const double> lookaheads) {
  FeatureVector f;
  f.values.reserve(feature_dimension(lookaheads.size()));
  f.values.push_back(projection.lateral_offset);
  f.values.push_back(normalize_angle(state.heading - track.tangent_heading_at(projection.s)));
  f.values.push_back(state.speed);
  for (double ahead : lookaheads) {
    f.values.push_back(track.curvature_at(track.wrap_s(projection.s + ahead)));
  }
  f.values.push_back(1.0);
  return f;
}

Policy Policy::zeros(std::vector<double> lookaheads) {
  Policy p;
  p.lookaheads = std::move(lookaheads);
  p.weights.assign(2 * p.feature_dim(), 0.0);
  return p;
}

Action act(const Policy& policy, const FeatureVector& features, const ActionBounds& bounds) {
  const std::size_t dim = policy.feature_dim();
  if (features.size() != dim || policy.weights.size() != 2 * dim) {
    throw ContractViolation("act: feature dimension does not match policy");
  }
  const auto speed_row = policy.speed_row();
  const auto steer_row = policy.steering_row();
  const double pre_speed =
      std::inner_product(speed_row.begin(), speed_row.end(), features.values.begin(), 0.0);
  const double pre_steer =
      std::inner_product(steer_row.begin(), steer_row.end(), features.values.begin(), 0.0);
  const double sigmoid = 1.0 / (1.0 + std::exp(-pre_speed));
  Action a;
  a.target_speed = std::clamp(bounds.speed_min + (bounds.speed_max - bounds.speed_min) * sigmoid,
                              bounds.speed_min, bounds.speed_max);
  a.steering_angle = bounds.steering_limit * std::tanh(pre_steer);
  return a;
}

}  // namespace trackforge
