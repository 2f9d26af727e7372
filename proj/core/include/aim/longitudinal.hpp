#pragma once

namespace aim {

/// Time-gap regulation parameters shared by the reservation policy and the
/// motion planner's follow mode.
struct TimeGapParams {
  double headway = 1.5;     // s
  double standstill = 2.0;  // m margin at v = 0
  double k_gap = 0.5;       // 1/s^2
  double k_speed = 1.5;     // 1/s
  double comfort_decel = 2.0;  // m/s^2, threshold for the braking bound
};

/// Acceleration command toward a time-gap of `headway` behind a lead vehicle.
/// `gap` is bumper-to-bumper. When closing on a slower lead requires more
/// than comfortable braking, the constant-deceleration requirement
/// -(v_ego^2 - v_lead^2) / (2 (gap - standstill)) takes over. Unclamped.
double time_gap_accel(double gap, double v_ego, double v_lead, const TimeGapParams& p);

/// Minimal constant acceleration so that a vehicle at speed `v` does not
/// cover `dist` before `t_req` seconds have elapsed. Falls back to stopping
/// `stop_margin` short of `dist` when the timed solution would require
/// reversing. Returns a non-positive value (0 when no braking is needed).
double yield_accel(double dist, double v, double t_req, double stop_margin);

}  // namespace aim
