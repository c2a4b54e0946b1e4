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
#include <span>
#include <vector>

#include "trackforge/dynamics.hpp"
#include "trackforge/track.hpp"

namespace trackforge {

// Ground-truth observation: [lateral_offset, heading_error, speed,
// curvature_ahead..., 1].
struct FeatureVector {
  std::vector<double> values;

  double lateral_offset() const { return values[0]; }
  double heading_error() const { return values[1]; }
  double speed() const { return values[2]; }
  std::span<const double> curvature_ahead() const {
    return std::span<const double>(values).subspan(3, values.size() - 4);
  }
  double bias() const { return values.back(); }
  std::size_t size() const { return values.size(); }
};

inline std::size_t feature_dimension(std::size_t lookahead_count) { return 4 + lookahead_count; }

FeatureVector featurize(const TrackModel& track, const VehicleState& state,
                        std::span<const double> lookaheads);
// Same, reusing a projection of the current position.
FeatureVector featurize(const TrackModel& track, const VehicleState& state,
                        const Projection& projection, std::span<const double> lookaheads);

// Linear map from features to (speed, steering) pre-activations, squashed into
// the action bounds with a sigmoid and a tanh.
struct Policy {
  std::vector<double> lookaheads;  // m
  std::vector<double> weights;     // 2 x feature_dimension, row-major

  static Policy zeros(std::vector<double> lookaheads);

  std::size_t feature_dim() const { return feature_dimension(lookaheads.size()); }
  std::span<const double> speed_row() const { return std::span(weights).first(feature_dim()); }
  std::span<const double> steering_row() const { return std::span(weights).subspan(feature_dim()); }
};

Action act(const Policy& policy, const FeatureVector& features, const ActionBounds& bounds);

}  // namespace trackforge
