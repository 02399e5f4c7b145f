#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

namespace deltasim {

inline constexpr double kPi = std::numbers::pi;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  bool operator==(const Vec2&) const = default;

  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double cross(Vec2 o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
  double squared_norm() const { return x * x + y * y; }
  // Counter-clockwise perpendicular (the left-hand side of this direction).
  Vec2 left() const { return {-y, x}; }
  Vec2 rotated(double angle) const {
    const double c = std::cos(angle), s = std::sin(angle);
    return {c * x - s * y, s * x + c * y};
  }
  bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

inline Vec2 heading_dir(double heading) {
  return {std::cos(heading), std::sin(heading)};
}

// Wraps an angle into (-pi, pi].
inline double wrap_angle(double a) {
  a = std::fmod(a + kPi, 2.0 * kPi);
  if (a <= 0.0) a += 2.0 * kPi;
  return a - kPi;
}

using Polyline = std::vector<Vec2>;

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b);
double segment_segment_distance(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2);

// Axis-aligned-in-body-frame rectangle at an arbitrary pose.
struct OrientedBox {
  Vec2 center;
  double heading = 0.0;
  double length = 0.0;  // extent along heading
  double width = 0.0;

  Vec2 axis_long() const { return heading_dir(heading); }
  Vec2 axis_lat() const { return heading_dir(heading).left(); }
  std::array<Vec2, 4> corners() const;
};

// Separating-axis overlap depth over the four face normals. Positive values
// are the penetration depth; non-positive values mean the boxes are separated
// along at least one face axis.
double sat_overlap_depth(const OrientedBox& a, const OrientedBox& b);

// Overlap test with a tolerance: penetration depths <= tol count as
// non-colliding so near-tangent contacts classify deterministically.
inline bool boxes_collide(const OrientedBox& a, const OrientedBox& b,
                          double tol = 1e-6) {
  return sat_overlap_depth(a, b) > tol;
}

// Minimum separation between two boxes; 0 when they overlap or touch.
double box_distance(const OrientedBox& a, const OrientedBox& b);

struct PolylineHit {
  double distance = 0.0;         // unsigned distance to the nearest segment
  double signed_distance = 0.0;  // negative on the left of the segment's traversal
  std::size_t polyline = 0;
  std::size_t segment = 0;
};

// Nearest point over a set of polylines. Ties keep the first (polyline,
// segment) in iteration order. The sign convention: left of the winning
// segment's traversal direction is negative.
PolylineHit nearest_on_polylines(Vec2 p, std::span<const Polyline> lines);

}  // namespace deltasim
