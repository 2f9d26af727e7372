#pragma once

#include "aim/geometry.hpp"

namespace aim {

struct PurePursuitParams {
  double min_lookahead = 3.0;   // m
  double lookahead_gain = 0.8;  // s, lookahead = max(min, gain * speed)
  double max_steer = 0.6;       // rad
};

/// Steering angle toward a goal point `lookahead` meters ahead on the path.
/// `s_hint` is the vehicle's current arc position on the path.
double pure_pursuit_steering(const Polyline& path, const Pose& pose, double s_hint,
                             double speed, double wheelbase, const PurePursuitParams& p);

struct BicycleState {
  Pose pose;
  double speed = 0.0;
};

/// Kinematic bicycle step, explicit Euler: position and heading advance with
/// the pre-update speed, then the speed integrates the acceleration (floored
/// at zero).
BicycleState bicycle_step(const BicycleState& state, double accel, double steer,
                          double wheelbase, double dt);

}  // namespace aim
