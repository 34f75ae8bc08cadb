#pragma once

// Planar geometry for the parking harness: oriented rectangles with a
// separating-axis overlap test, and arc-length parametrised polylines.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include "hfcfdt/errors.hpp"

namespace hfcfdt::harness {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) noexcept { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) noexcept { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double k, Vec2 a) noexcept { return {k * a.x, k * a.y}; }
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline double dot(Vec2 a, Vec2 b) noexcept { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) noexcept { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) noexcept { return std::hypot(a.x, a.y); }

/// Wraps an angle to (-pi, pi].
inline double wrap_angle(double a) noexcept {
  constexpr double kPi = 3.14159265358979323846;
  a = std::remainder(a, 2.0 * kPi);
  return a <= -kPi ? a + 2.0 * kPi : a;
}

struct OrientedRect {
  Vec2 center;
  double half_length = 0.5;  // along the heading
  double half_width = 0.5;
  double angle = 0.0;

  static OrientedRect axis_aligned(double x0, double y0, double x1, double y1) {
    return {{0.5 * (x0 + x1), 0.5 * (y0 + y1)}, 0.5 * std::abs(x1 - x0), 0.5 * std::abs(y1 - y0), 0.0};
  }

  Vec2 axis_u() const noexcept { return {std::cos(angle), std::sin(angle)}; }
  Vec2 axis_v() const noexcept { return {-std::sin(angle), std::cos(angle)}; }

  /// Counter-clockwise from the rear-right corner.
  std::array<Vec2, 4> corners() const noexcept {
    const Vec2 u = half_length * axis_u();
    const Vec2 v = half_width * axis_v();
    return {center - u - v, center + u - v, center + u + v, center - u + v};
  }

  bool contains(Vec2 p) const noexcept {
    const Vec2 d = p - center;
    return std::abs(dot(d, axis_u())) <= half_length && std::abs(dot(d, axis_v())) <= half_width;
  }
};

/// Signed separating-axis margin: the largest gap between the projections
/// over the four candidate axes. Positive means separated by that distance
/// along some axis; non-positive means the rectangles overlap (touching
/// counts as overlap) and its magnitude is the smallest penetration.
inline double separation(const OrientedRect& a, const OrientedRect& b) noexcept {
  const std::array<Vec2, 4> axes = {a.axis_u(), a.axis_v(), b.axis_u(), b.axis_v()};
  const auto ca = a.corners();
  const auto cb = b.corners();
  double best = -std::numeric_limits<double>::infinity();
  for (const Vec2& axis : axes) {
    double amin = std::numeric_limits<double>::infinity(), amax = -amin;
    double bmin = amin, bmax = -amin;
    for (const Vec2& c : ca) {
      const double p = dot(c, axis);
      amin = std::min(amin, p);
      amax = std::max(amax, p);
    }
    for (const Vec2& c : cb) {
      const double p = dot(c, axis);
      bmin = std::min(bmin, p);
      bmax = std::max(bmax, p);
    }
    best = std::max(best, std::max(bmin - amax, amin - bmax));
  }
  return best;
}

inline bool overlaps(const OrientedRect& a, const OrientedRect& b) noexcept { return separation(a, b) <= 0.0; }

/// Arc-length parametrised polyline. Queries beyond either end extrapolate
/// along the end segment.
class Polyline {
 public:
  Polyline() = default;

  explicit Polyline(std::vector<Vec2> pts) : pts_(std::move(pts)) {
    if (pts_.size() < 2) throw ConfigError("path needs at least two points");
    s_.assign(1, 0.0);
    for (std::size_t i = 1; i < pts_.size(); ++i) {
      const double len = norm(pts_[i] - pts_[i - 1]);
      if (!(len > 0.0)) throw ConfigError("path has repeated points");
      s_.push_back(s_.back() + len);
    }
  }

  const std::vector<Vec2>& points() const noexcept { return pts_; }
  double length() const noexcept { return s_.empty() ? 0.0 : s_.back(); }

  Vec2 point_at(double s) const noexcept {
    const std::size_t i = segment_at(s);
    const double t = (s - s_[i]) / (s_[i + 1] - s_[i]);
    return pts_[i] + t * (pts_[i + 1] - pts_[i]);
  }

  /// Unit direction of travel at arc length s.
  Vec2 tangent_at(double s) const noexcept {
    const std::size_t i = segment_at(s);
    const Vec2 d = pts_[i + 1] - pts_[i];
    return (1.0 / norm(d)) * d;
  }

  /// Closest point on the polyline restricted to arc lengths in [s_lo, s_hi].
  double project(Vec2 p, double s_lo, double s_hi) const noexcept {
    s_lo = std::max(0.0, s_lo);
    s_hi = std::min(length(), s_hi);
    double best_s = s_lo;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < pts_.size(); ++i) {
      if (s_[i + 1] < s_lo || s_[i] > s_hi) continue;
      const Vec2 d = pts_[i + 1] - pts_[i];
      const double seg = s_[i + 1] - s_[i];
      double t = dot(p - pts_[i], d) / (seg * seg);
      const double t_lo = std::max(0.0, (s_lo - s_[i]) / seg);
      const double t_hi = std::min(1.0, (s_hi - s_[i]) / seg);
      t = std::clamp(t, t_lo, t_hi);
      const double dist = norm(p - (pts_[i] + t * d));
      if (dist < best_d) {
        best_d = dist;
        best_s = s_[i] + t * seg;
      }
    }
    return best_s;
  }

  double distance_to(Vec2 p) const noexcept { return norm(p - point_at(project(p, 0.0, length()))); }

 private:
  std::size_t segment_at(double s) const noexcept {
    if (s <= s_.front()) return 0;
    if (s >= s_.back()) return pts_.size() - 2;
    const auto it = std::upper_bound(s_.begin(), s_.end(), s);
    return static_cast<std::size_t>(it - s_.begin()) - 1;
  }

  std::vector<Vec2> pts_;
  std::vector<double> s_;
};

}  // namespace hfcfdt::harness
