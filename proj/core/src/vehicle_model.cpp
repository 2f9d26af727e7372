#include "aim/vehicle_model.hpp"

#include <algorithm>
#include <cmath>

namespace aim {

double pure_pursuit_steering(const Polyline& path, const Pose& pose, double s_hint,
                             double speed, double wheelbase, const PurePursuitParams& p) {
  const double lookahead = std::max(p.min_lookahead, p.lookahead_gain * speed);
  const Vec2 goal = path.point_at(std::min(s_hint + lookahead, path.length()));
  const Vec2 delta = goal - pose.position();
  const double dist = std::max(norm(delta), 1e-6);
  const double alpha = normalize_angle(std::atan2(delta.y, delta.x) - pose.heading);
  const double steer = std::atan2(2.0 * wheelbase * std::sin(alpha), dist);
  return std::clamp(steer, -p.max_steer, p.max_steer);
}

BicycleState bicycle_step(const BicycleState& state, double accel, double steer,
                          double wheelbase, double dt) {
  BicycleState next = state;
  const double v = state.speed;
  next.pose.x += v * std::cos(state.pose.heading) * dt;
  next.pose.y += v * std::sin(state.pose.heading) * dt;
  next.pose.heading =
      normalize_angle(state.pose.heading + v / wheelbase * std::tan(steer) * dt);
  next.speed = std::max(v + accel * dt, 0.0);
  return next;
}

}  // namespace aim
