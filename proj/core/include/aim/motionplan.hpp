#pragma once

#include <optional>
#include <vector>

#include "aim/envmodel.hpp"
#include "aim/longitudinal.hpp"

namespace aim {

/// One trajectory sample on a fixed 0.1 s grid.
struct TrajectoryPoint {
  double t = 0.0;
  Pose pose;
  double speed = 0.0;
  double accel = 0.0;
  double curvature = 0.0;
  double arc = 0.0;  // arc position on the objective path
};

struct Trajectory {
  std::vector<TrajectoryPoint> samples;
  double horizon = 0.0;
  /// No candidate satisfied the hard limits; a maximum-braking fallback is
  /// returned instead. A safety layer would have vetoed this plan.
  bool infeasible = false;
  /// The planner is regulating a gap behind a lead vehicle; anchor points
  /// are superseded while engaged.
  bool follow_mode = false;
};

/// Dimensionless multipliers on the candidate cost terms.
struct CostWeights {
  double anchor_time = 10.0;
  double anchor_speed = 2.0;
  double accel = 1.0;
  double jerk = 1.0;
  double limit_dev = 5.0;
};

struct MotionPlannerConfig {
  double dt = 0.1;
  double hard_accel = 3.5;      // m/s^2, |a| bound of any returned sample
  double hard_lat_accel = 3.0;  // m/s^2, v^2 * kappa bound
  double env_lat_accel = 2.8;   // m/s^2, envelope curve-speed target
  double env_accel = 3.0;       // m/s^2, cruise acceleration cap toward the envelope
  double env_gain = 0.5;        // 1/s, proportional envelope tracking gain
  double env_decel = 2.0;       // m/s^2, envelope backward propagation
  double follow_range = 60.0;   // m, lead sensing range
  /// Follow mode only supersedes the anchor once the lead actually
  /// constrains the plan: gap below the desired time gap plus this margin.
  double follow_engage_margin = 8.0;  // m
  TimeGapParams follow;         // follow-mode regulation constants
  double max_horizon = 60.0;    // s
};

/// Ego state projected onto the objective path.
struct EgoState {
  double arc = 0.0;
  double speed = 0.0;
  double accel = 0.0;
};

/// Lead vehicle on the same path, bumper-to-bumper gap.
struct LeadInfo {
  double gap = 0.0;
  double speed = 0.0;
};

/// Follow-mode acceleration command, clamped to the hard limit. Sets
/// `infeasible` when avoiding the lead would need more than the hard limit.
double follow_accel(const LeadInfo& lead, double v_ego, const MotionPlannerConfig& cfg,
                    bool* infeasible);

/// Plans a drivable trajectory along the objective path. Longitudinal
/// candidates are quartic/quintic profiles over a grid of terminal times and
/// speeds; candidates violating the hard limits are discarded and the
/// minimum-cost survivor wins. With a lead vehicle in range the planner
/// instead regulates the follow gap and ignores anchors. When nothing is
/// feasible, a flagged maximum-braking trajectory is returned.
Trajectory plan_trajectory(const MotionPlanningObjective& obj, const EgoState& ego,
                           const std::optional<LeadInfo>& lead, const CostWeights& weights,
                           const MotionPlannerConfig& cfg, double horizon);

}  // namespace aim
