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
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

namespace trackforge {

struct Vec2 {
  double x{};
  double y{};
};

using Waypoint = Vec2;

enum class SegmentClass { Straight, Curved };

struct Projection {
  double s{};               // arc-length coordinate, [0, total_length)
  double lateral_offset{};  // signed, positive left of travel direction
  std::size_t segment_index{};
};

// Closed polyline track. The last waypoint connects back to the first.
// Immutable after construction; safe to share across threads.
class TrackModel {
 public:
  static constexpr std::size_t kMinWaypoints = 8;
  static constexpr double kMinSpacing = 1e-9;
  // Stencils with a smaller triangle area are treated as straight.
  static constexpr double kCollinearArea = 1e-12;

  TrackModel(std::vector<Waypoint> waypoints, double half_width);

  const std::vector<Waypoint>& waypoints() const { return waypoints_; }
  std::size_t size() const { return waypoints_.size(); }
  double half_width() const { return half_width_; }
  const std::vector<double>& cum_arc_length() const { return cum_; }
  double total_length() const { return total_length_; }
  const std::vector<double>& curvature_samples() const { return curvature_; }

  // Length of the segment from waypoint i to waypoint i+1 (wrapping).
  double segment_length(std::size_t i) const;

  // Closest point on the polyline. Ties go to the lower segment index.
  Projection project(Vec2 position) const;

  // Polyline point at arc coordinate s (wrapped into [0, total_length)).
  Vec2 point_at(double s) const;
  // Unit tangent of the segment containing s.
  Vec2 tangent_at(double s) const;
  double tangent_heading_at(double s) const;

  double progress_at(double s) const;
  double curvature_at(double s) const;
  double mean_curvature(double s_center, double window) const;
  SegmentClass classify_segment(double s, double threshold) const;

  // Maps any real s into [0, total_length).
  double wrap_s(double s) const;

 private:
  std::size_t segment_containing(double s) const;

  std::vector<Waypoint> waypoints_;
  double half_width_;
  std::vector<double> cum_;
  std::vector<double> seg_len_;
  double total_length_{};
  std::vector<double> curvature_;
};

// Unsigned curvature of the circle through three points; 0 for collinear.
double menger_curvature(Vec2 prev, Vec2 mid, Vec2 next);

// Track file: CSV with header `x,y`, `#` comment lines allowed.
TrackModel load_track(const std::filesystem::path& path, double half_width);
std::vector<Waypoint> parse_track_csv(std::string_view text);
void save_track(const std::filesystem::path& path, std::span<const Waypoint> waypoints);

namespace shapes {

// Regular polygon of n points on a circle of the given radius, CCW from +x.
std::vector<Waypoint> circle(double radius, std::size_t n);
// Axis-aligned square with sharp corners; points every `spacing` meters.
std::vector<Waypoint> square(double side, double spacing);
// Stadium: two straights joined by semicircles, CCW, starting at the
// beginning of the bottom straight.
std::vector<Waypoint> stadium(double straight_length, double radius, double spacing);

// Bundled tracks: a 6 m x 1.5 m radius stadium, and a stadium with tight
// 0.45 m hairpins that force slow cornering.
std::vector<Waypoint> oval();
std::vector<Waypoint> slow_corner();

}  // namespace shapes

}  // namespace trackforge
