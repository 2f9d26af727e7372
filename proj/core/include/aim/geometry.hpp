#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

namespace aim {

inline constexpr double kPi = 3.14159265358979323846;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double k) const { return {x * k, y * k}; }
  bool operator==(const Vec2& o) const { return x == o.x && y == o.y; }
};

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
double norm(const Vec2& a);
double distance(const Vec2& a, const Vec2& b);

/// Normalizes an angle into (-pi, pi].
double normalize_angle(double a);

/// Planar pose in a local ENU frame, heading in (-pi, pi].
struct Pose {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;

  Vec2 position() const { return {x, y}; }
};

/// Piecewise-linear curve with cached cumulative arc lengths and
/// per-vertex discrete curvature.
class Polyline {
 public:
  Polyline() = default;
  explicit Polyline(std::vector<Vec2> points);

  bool empty() const { return pts_.empty(); }
  std::size_t size() const { return pts_.size(); }
  const std::vector<Vec2>& points() const { return pts_; }
  const std::vector<double>& cumulative() const { return s_; }
  double length() const { return s_.empty() ? 0.0 : s_.back(); }

  /// Point at arc length s; s is clamped to [0, length].
  Vec2 point_at(double s) const;
  /// Tangent heading at arc length s (heading of the containing segment).
  double heading_at(double s) const;
  /// Unsigned discrete curvature at arc length s, interpolated between
  /// vertex estimates.
  double curvature_at(double s) const;

  struct Projection {
    double s = 0.0;        // arc length of the closest point
    double lateral = 0.0;  // signed offset, left of travel direction positive
    double distance = 0.0; // unsigned distance to the closest point
  };
  /// Closest-point projection onto the polyline; endpoints clamp.
  Projection project(const Vec2& p) const;

  /// Segment index containing arc length s (clamped).
  std::size_t segment_index(double s) const;

 private:
  std::vector<Vec2> pts_;
  std::vector<double> s_;      // cumulative arc length per vertex
  std::vector<double> kappa_;  // discrete curvature per vertex
};

/// Proper intersection of two segments, returned as parameters along each
/// segment in [0, 1]. Collinear overlaps are ignored.
std::optional<std::pair<double, double>> segment_intersection(
    const Vec2& a0, const Vec2& a1, const Vec2& b0, const Vec2& b1);

/// Sampled circular arc from `start`, initial heading `heading0`, signed
/// curvature 1/radius (positive turns left), swept by `angle` radians.
std::vector<Vec2> sample_arc(const Vec2& start, double heading0, double radius,
                             double angle, double max_step = 0.5);

/// Inserts intermediate points so no segment exceeds max_step.
std::vector<Vec2> densify(const std::vector<Vec2>& points, double max_step);

}  // namespace aim
