#include "aim/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace aim {

double norm(const Vec2& a) { return std::hypot(a.x, a.y); }

double distance(const Vec2& a, const Vec2& b) { return norm(a - b); }

double normalize_angle(double a) {
  double r = std::fmod(a + kPi, 2.0 * kPi);
  if (r <= 0.0) r += 2.0 * kPi;
  return r - kPi;
}

Polyline::Polyline(std::vector<Vec2> points) : pts_(std::move(points)) {
  if (pts_.size() < 2) {
    throw std::invalid_argument("polyline needs at least 2 points");
  }
  s_.resize(pts_.size());
  s_[0] = 0.0;
  for (std::size_t i = 1; i < pts_.size(); ++i) {
    const double d = distance(pts_[i - 1], pts_[i]);
    if (d <= 0.0) {
      throw std::invalid_argument("polyline points must be pairwise distinct");
    }
    s_[i] = s_[i - 1] + d;
  }
  // Discrete curvature per vertex: heading change over the mean of the
  // adjacent segment lengths. Endpoints get zero.
  kappa_.assign(pts_.size(), 0.0);
  for (std::size_t i = 1; i + 1 < pts_.size(); ++i) {
    const Vec2 d0 = pts_[i] - pts_[i - 1];
    const Vec2 d1 = pts_[i + 1] - pts_[i];
    const double h0 = std::atan2(d0.y, d0.x);
    const double h1 = std::atan2(d1.y, d1.x);
    const double dl = 0.5 * ((s_[i] - s_[i - 1]) + (s_[i + 1] - s_[i]));
    kappa_[i] = std::abs(normalize_angle(h1 - h0)) / dl;
  }
}

std::size_t Polyline::segment_index(double s) const {
  if (s <= 0.0) return 0;
  if (s >= length()) return pts_.size() - 2;
  const auto it = std::upper_bound(s_.begin(), s_.end(), s);
  const std::size_t i = static_cast<std::size_t>(it - s_.begin());
  return std::min(i - 1, pts_.size() - 2);
}

Vec2 Polyline::point_at(double s) const {
  const double sc = std::clamp(s, 0.0, length());
  const std::size_t i = segment_index(sc);
  const double seg_len = s_[i + 1] - s_[i];
  const double t = seg_len > 0.0 ? (sc - s_[i]) / seg_len : 0.0;
  return pts_[i] + (pts_[i + 1] - pts_[i]) * t;
}

double Polyline::heading_at(double s) const {
  const std::size_t i = segment_index(std::clamp(s, 0.0, length()));
  const Vec2 d = pts_[i + 1] - pts_[i];
  return std::atan2(d.y, d.x);
}

double Polyline::curvature_at(double s) const {
  const double sc = std::clamp(s, 0.0, length());
  const std::size_t i = segment_index(sc);
  const double seg_len = s_[i + 1] - s_[i];
  const double t = seg_len > 0.0 ? (sc - s_[i]) / seg_len : 0.0;
  return kappa_[i] * (1.0 - t) + kappa_[i + 1] * t;
}

Polyline::Projection Polyline::project(const Vec2& p) const {
  Projection best;
  best.distance = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < pts_.size(); ++i) {
    const Vec2 a = pts_[i];
    const Vec2 b = pts_[i + 1];
    const Vec2 ab = b - a;
    const double len2 = dot(ab, ab);
    const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
    const Vec2 q = a + ab * t;
    const double d = distance(p, q);
    if (d < best.distance) {
      best.distance = d;
      best.s = s_[i] + t * (s_[i + 1] - s_[i]);
      const double side = cross(ab, p - q);
      best.lateral = side >= 0.0 ? d : -d;
    }
  }
  return best;
}

std::optional<std::pair<double, double>> segment_intersection(
    const Vec2& a0, const Vec2& a1, const Vec2& b0, const Vec2& b1) {
  const Vec2 r = a1 - a0;
  const Vec2 s = b1 - b0;
  const double denom = cross(r, s);
  if (std::abs(denom) < 1e-12) return std::nullopt;
  const Vec2 qp = b0 - a0;
  const double t = cross(qp, s) / denom;
  const double u = cross(qp, r) / denom;
  if (t < 0.0 || t > 1.0 || u < 0.0 || u > 1.0) return std::nullopt;
  return std::make_pair(t, u);
}

std::vector<Vec2> densify(const std::vector<Vec2>& points, double max_step) {
  std::vector<Vec2> out;
  if (points.empty()) return out;
  out.push_back(points.front());
  for (std::size_t i = 1; i < points.size(); ++i) {
    const Vec2 a = points[i - 1];
    const Vec2 b = points[i];
    const double d = distance(a, b);
    const int n = std::max(1, static_cast<int>(std::ceil(d / max_step)));
    for (int k = 1; k <= n; ++k) {
      out.push_back(a + (b - a) * (static_cast<double>(k) / n));
    }
  }
  return out;
}

std::vector<Vec2> sample_arc(const Vec2& start, double heading0, double radius,
                             double angle, double max_step) {
  const double arc_len = std::abs(angle) * radius;
  const int n = std::max(2, static_cast<int>(std::ceil(arc_len / max_step)) + 1);
  // Center is perpendicular to the initial heading, on the turning side.
  const double side = angle >= 0.0 ? 1.0 : -1.0;
  const Vec2 center{start.x - side * radius * std::sin(heading0),
                    start.y + side * radius * std::cos(heading0)};
  const double theta0 = std::atan2(start.y - center.y, start.x - center.x);
  std::vector<Vec2> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double th = theta0 + angle * static_cast<double>(i) / (n - 1);
    out.push_back({center.x + radius * std::cos(th), center.y + radius * std::sin(th)});
  }
  return out;
}

}  // namespace aim
