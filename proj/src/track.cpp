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

#include "trackforge/track.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

#include "trackforge/errors.hpp"
#include "trackforge/util.hpp"

namespace trackforge {
namespace {

// Projection distances closer than this are considered tied.
constexpr double kTieTolerance = 1e-12;

double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
double dist(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

}  // namespace

double menger_curvature(Vec2 prev, Vec2 mid, Vec2 next) {
  const double area = 0.5 * std::abs(cross({mid.x - prev.x, mid.y - prev.y},
                                           {next.x - prev.x, next.y - prev.y}));
  if (area < TrackModel::kCollinearArea) return 0.0;
  const double a = dist(prev, mid);
  const double b = dist(mid, next);
  const double c = dist(prev, next);
  return 4.0 * area / (a * b * c);
}

TrackModel::TrackModel(std::vector<Waypoint> waypoints, double half_width)
    : waypoints_(std::move(waypoints)), half_width_(half_width) {
  const std::size_t n = waypoints_.size();
  if (n < kMinWaypoints) {
    throw InvalidParameter("too few waypoints (" + std::to_string(n) + " < " +
                           std::to_string(kMinWaypoints) + ")");
  }
  if (!(half_width_ > 0.0) || !std::isfinite(half_width_)) {
    throw InvalidParameter("half_width must be positive and finite");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(waypoints_[i].x) || !std::isfinite(waypoints_[i].y)) {
      throw InvalidParameter("waypoint " + std::to_string(i) + " is not finite");
    }
  }

  cum_.resize(n);
  seg_len_.resize(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double len = dist(waypoints_[i], waypoints_[(i + 1) % n]);
    if (!(len > kMinSpacing)) {
      throw InvalidParameter("duplicate consecutive waypoints at index " + std::to_string(i));
    }
    cum_[i] = acc;
    seg_len_[i] = len;
    acc += len;
  }
  total_length_ = acc;

  curvature_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    curvature_[i] =
        menger_curvature(waypoints_[(i + n - 1) % n], waypoints_[i], waypoints_[(i + 1) % n]);
  }
}

double TrackModel::segment_length(std::size_t i) const { return seg_len_[i % size()]; }

double TrackModel::wrap_s(double s) const {
  double w = std::fmod(s, total_length_);
  if (w < 0.0) w += total_length_;
  if (w >= total_length_) w = 0.0;
  return w;
}

std::size_t TrackModel::segment_containing(double s) const {
  auto it = std::upper_bound(cum_.begin(), cum_.end(), s);
  return static_cast<std::size_t>(std::distance(cum_.begin(), it)) - 1;
}

Projection TrackModel::project(Vec2 p) const {
  const std::size_t n = size();
  Projection best;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = waypoints_[i];
    const Vec2 b = waypoints_[(i + 1) % n];
    const Vec2 d{b.x - a.x, b.y - a.y};
    const Vec2 ap{p.x - a.x, p.y - a.y};
    const double len2 = seg_len_[i] * seg_len_[i];
    const double u = std::clamp((ap.x * d.x + ap.y * d.y) / len2, 0.0, 1.0);
    const Vec2 c{a.x + u * d.x, a.y + u * d.y};
    const double dd = dist(p, c);
    if (dd < best_dist - kTieTolerance) {
      best_dist = dd;
      best.segment_index = i;
      best.s = cum_[i] + u * seg_len_[i];
      best.lateral_offset = cross(d, ap) < 0.0 ? -dd : dd;
    }
  }
  if (best.s >= total_length_) best.s -= total_length_;
  return best;
}

Vec2 TrackModel::point_at(double s) const {
  s = wrap_s(s);
  const std::size_t i = segment_containing(s);
  const Vec2 a = waypoints_[i];
  const Vec2 b = waypoints_[(i + 1) % size()];
  const double u = (s - cum_[i]) / seg_len_[i];
  return {a.x + u * (b.x - a.x), a.y + u * (b.y - a.y)};
}

Vec2 TrackModel::tangent_at(double s) const {
  const std::size_t i = segment_containing(wrap_s(s));
  const Vec2 a = waypoints_[i];
  const Vec2 b = waypoints_[(i + 1) % size()];
  return {(b.x - a.x) / seg_len_[i], (b.y - a.y) / seg_len_[i]};
}

double TrackModel::tangent_heading_at(double s) const {
  const Vec2 t = tangent_at(s);
  return std::atan2(t.y, t.x);
}

double TrackModel::progress_at(double s) const {
  if (!(s >= 0.0 && s < total_length_)) {
    throw ContractViolation("progress_at: s outside [0, total_length)");
  }
  return s / total_length_;
}

double TrackModel::curvature_at(double s) const {
  s = wrap_s(s);
  const std::size_t i = segment_containing(s);
  const double u = (s - cum_[i]) / seg_len_[i];
  const double k0 = curvature_[i];
  const double k1 = curvature_[(i + 1) % size()];
  if (k0 == k1) return k0;
  return (1.0 - u) * k0 + u * k1;
}

double TrackModel::mean_curvature(double s_center, double window) const {
  if (!(window > 0.0)) throw ContractViolation("mean_curvature: window must be positive");
  s_center = wrap_s(s_center);
  const double half = 0.5 * window;
  // Running mean keeps a constant sequence exact.
  double mean = 0.0;
  std::size_t count = 0;
  std::size_t nearest = 0;
  double nearest_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < size(); ++i) {
    double gap = std::abs(cum_[i] - s_center);
    gap = std::min(gap, total_length_ - gap);
    if (gap < nearest_gap) {
      nearest_gap = gap;
      nearest = i;
    }
    if (gap <= half) {
      ++count;
      mean += (curvature_[i] - mean) / static_cast<double>(count);
    }
  }
  return count == 0 ? curvature_[nearest] : mean;
}

SegmentClass TrackModel::classify_segment(double s, double threshold) const {
  if (!(threshold > 0.0)) throw ContractViolation("classify_segment: threshold must be positive");
  return curvature_at(s) >= threshold ? SegmentClass::Curved : SegmentClass::Straight;
}

std::vector<Waypoint> parse_track_csv(std::string_view text) {
  std::vector<Waypoint> pts;
  std::vector<std::size_t> line_of;
  bool have_header = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = std::min(text.find('\n', pos), text.size());
    std::string_view line = trim(text.substr(pos, eol - pos));
    pos = eol + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') {
      if (eol == text.size()) break;
      continue;
    }
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (!have_header) {
      std::string compact;
      for (char ch : line) {
        if (ch != ' ' && ch != '\t') compact.push_back(ch);
      }
      if (compact != "x,y") throw LoadError(where + "expected header `x,y`");
      have_header = true;
      continue;
    }
    const std::size_t comma = line.find(',');
    if (comma == std::string_view::npos || line.find(',', comma + 1) != std::string_view::npos) {
      throw LoadError(where + "expected two comma-separated values");
    }
    const auto x = parse_double(trim(line.substr(0, comma)));
    const auto y = parse_double(trim(line.substr(comma + 1)));
    if (!x || !y) throw LoadError(where + "malformed number");
    if (!std::isfinite(*x) || !std::isfinite(*y)) throw LoadError(where + "non-finite coordinate");
    if (!pts.empty() && dist(pts.back(), {*x, *y}) <= TrackModel::kMinSpacing) {
      throw LoadError(where + "duplicate consecutive waypoint");
    }
    pts.push_back({*x, *y});
    line_of.push_back(line_no);
    if (eol == text.size()) break;
  }
  if (!have_header) throw LoadError("line 1: missing header `x,y`");
  if (pts.size() < TrackModel::kMinWaypoints) {
    throw LoadError("too few waypoints (" + std::to_string(pts.size()) + " < " +
                    std::to_string(TrackModel::kMinWaypoints) + ")");
  }
  if (dist(pts.back(), pts.front()) <= TrackModel::kMinSpacing) {
    throw LoadError("line " + std::to_string(line_of.back()) +
                    ": last waypoint duplicates the first (loop closure is implicit)");
  }
  return pts;
}

TrackModel load_track(const std::filesystem::path& path, double half_width) {
  if (!(half_width > 0.0)) throw LoadError("non-positive track half width");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open track file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return TrackModel(parse_track_csv(buf.str()), half_width);
  } catch (const LoadError& e) {
    throw LoadError(path.string() + ": " + e.what());
  }
}

void save_track(const std::filesystem::path& path, std::span<const Waypoint> waypoints) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write track file " + path.string());
  out << "x,y\n";
  for (const auto& w : waypoints) out << format_double(w.x) << ',' << format_double(w.y) << '\n';
}

namespace shapes {

std::vector<Waypoint> circle(double radius, std::size_t n) {
  std::vector<Waypoint> pts(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
    pts[i] = {radius * std::cos(a), radius * std::sin(a)};
  }
  return pts;
}

std::vector<Waypoint> square(double side, double spacing) {
  const auto per_side = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(side / spacing)));
  const Vec2 corners[4] = {{0, 0}, {side, 0}, {side, side}, {0, side}};
  std::vector<Waypoint> pts;
  for (int c = 0; c < 4; ++c) {
    const Vec2 a = corners[c];
    const Vec2 b = corners[(c + 1) % 4];
    for (std::size_t k = 0; k < per_side; ++k) {
      const double u = static_cast<double>(k) / static_cast<double>(per_side);
      pts.push_back({a.x + u * (b.x - a.x), a.y + u * (b.y - a.y)});
    }
  }
  return pts;
}

std::vector<Waypoint> stadium(double straight_length, double radius, double spacing) {
  const auto n_straight =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(straight_length / spacing)));
  const auto n_arc = std::max<std::size_t>(
      4, static_cast<std::size_t>(std::lround(std::numbers::pi * radius / spacing)));
  std::vector<Waypoint> pts;
  for (std::size_t k = 0; k < n_straight; ++k) {
    pts.push_back({straight_length * static_cast<double>(k) / static_cast<double>(n_straight), -radius});
  }
  for (std::size_t k = 0; k < n_arc; ++k) {
    const double a = -std::numbers::pi / 2 + std::numbers::pi * static_cast<double>(k) / static_cast<double>(n_arc);
    pts.push_back({straight_length + radius * std::cos(a), radius * std::sin(a)});
  }
  for (std::size_t k = 0; k < n_straight; ++k) {
    pts.push_back({straight_length * (1.0 - static_cast<double>(k) / static_cast<double>(n_straight)), radius});
  }
  for (std::size_t k = 0; k < n_arc; ++k) {
    const double a = std::numbers::pi / 2 + std::numbers::pi * static_cast<double>(k) / static_cast<double>(n_arc);
    pts.push_back({radius * std::cos(a), radius * std::sin(a)});
  }
  return pts;
}

std::vector<Waypoint> oval() { return stadium(6.0, 1.5, 0.1); }

std::vector<Waypoint> slow_corner() { return stadium(4.0, 0.45, 0.05); }

}  // namespace shapes

}  // namespace trackforge
