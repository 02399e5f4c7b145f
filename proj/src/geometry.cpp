#include "deltasim/geometry.hpp"

#include <algorithm>
#include <limits>

namespace deltasim {

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squared_norm();
  if (len2 == 0.0) return (p - a).norm();
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + ab * t)).norm();
}

namespace {

int orientation(Vec2 a, Vec2 b, Vec2 c) {
  const double v = (b - a).cross(c - a);
  if (v > 0.0) return 1;
  if (v < 0.0) return -1;
  return 0;
}

bool on_segment(Vec2 a, Vec2 b, Vec2 p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
         std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

bool segments_intersect(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2) {
  const int o1 = orientation(p1, p2, q1);
  const int o2 = orientation(p1, p2, q2);
  const int o3 = orientation(q1, q2, p1);
  const int o4 = orientation(q1, q2, p2);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(p1, p2, q1)) return true;
  if (o2 == 0 && on_segment(p1, p2, q2)) return true;
  if (o3 == 0 && on_segment(q1, q2, p1)) return true;
  if (o4 == 0 && on_segment(q1, q2, p2)) return true;
  return false;
}

}  // namespace

double segment_segment_distance(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2) {
  if (segments_intersect(p1, p2, q1, q2)) return 0.0;
  double d = point_segment_distance(p1, q1, q2);
  d = std::min(d, point_segment_distance(p2, q1, q2));
  d = std::min(d, point_segment_distance(q1, p1, p2));
  d = std::min(d, point_segment_distance(q2, p1, p2));
  return d;
}

std::array<Vec2, 4> OrientedBox::corners() const {
  const Vec2 u = axis_long() * (0.5 * length);
  const Vec2 v = axis_lat() * (0.5 * width);
  return {center + u + v, center - u + v, center - u - v, center + u - v};
}

double sat_overlap_depth(const OrientedBox& a, const OrientedBox& b) {
  const std::array<Vec2, 4> axes = {a.axis_long(), a.axis_lat(), b.axis_long(),
                                    b.axis_lat()};
  const Vec2 delta = b.center - a.center;
  double depth = std::numeric_limits<double>::infinity();
  for (const Vec2& axis : axes) {
    const double proj_a = 0.5 * a.length * std::abs(axis.dot(a.axis_long())) +
                          0.5 * a.width * std::abs(axis.dot(a.axis_lat()));
    const double proj_b = 0.5 * b.length * std::abs(axis.dot(b.axis_long())) +
                          0.5 * b.width * std::abs(axis.dot(b.axis_lat()));
    depth = std::min(depth, proj_a + proj_b - std::abs(axis.dot(delta)));
  }
  return depth;
}

double box_distance(const OrientedBox& a, const OrientedBox& b) {
  if (sat_overlap_depth(a, b) > 0.0) return 0.0;
  const auto ca = a.corners();
  const auto cb = b.corners();
  double d = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      d = std::min(d, segment_segment_distance(ca[i], ca[(i + 1) % 4], cb[j],
                                               cb[(j + 1) % 4]));
    }
  }
  return d;
}

PolylineHit nearest_on_polylines(Vec2 p, std::span<const Polyline> lines) {
  PolylineHit best;
  best.distance = std::numeric_limits<double>::infinity();
  for (std::size_t li = 0; li < lines.size(); ++li) {
    const Polyline& line = lines[li];
    for (std::size_t si = 0; si + 1 < line.size(); ++si) {
      const double d = point_segment_distance(p, line[si], line[si + 1]);
      if (d < best.distance) {
        best.distance = d;
        best.polyline = li;
        best.segment = si;
      }
    }
  }
  const Polyline& line = lines[best.polyline];
  const Vec2 a = line[best.segment];
  const Vec2 b = line[best.segment + 1];
  const double side = (b - a).cross(p - a);
  best.signed_distance = side < 0.0 ? best.distance : -best.distance;
  return best;
}

}  // namespace deltasim
