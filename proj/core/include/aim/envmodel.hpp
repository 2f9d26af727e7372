#pragma once

#include <optional>
#include <string>
#include <vector>

#include "aim/geometry.hpp"

namespace aim {

/// Ordered list of lane ids from the current lane to the destination lane.
struct RouteSpec {
  std::vector<std::string> lanes;

  bool operator==(const RouteSpec& o) const { return lanes == o.lanes; }
};

/// One vehicle in an environment-model snapshot. `route` is absent for
/// non-connected vehicles whose intent is unknown; controllable vehicles
/// always declare their route.
struct VehicleRecord {
  int id = 0;
  Pose pose;
  double speed = 0.0;
  std::optional<RouteSpec> route;
  bool controllable = false;
};

/// Immutable snapshot of all relevant vehicles at one point in time.
/// Vehicles are kept sorted by id; ids are pairwise distinct.
struct EnvironmentModel {
  double timestamp = 0.0;
  std::vector<VehicleRecord> vehicles;

  const VehicleRecord* find(int id) const;
};

/// Space-time-speed constraint the vehicle shall cross: position on the
/// objective path, duration from the objective issue timestamp, and the
/// desired crossing speed.
struct AnchorPoint {
  Vec2 position;
  double dt = 0.0;     // seconds after the objective issue timestamp, > 0
  double speed = 0.0;  // m/s, >= 0

  bool operator==(const AnchorPoint& o) const {
    return position == o.position && dt == o.dt && speed == o.speed;
  }
};

/// High-level plan handed to a vehicle's motion planner: path waypoints, a
/// piecewise-constant max-speed bound per path segment, and anchor points.
struct MotionPlanningObjective {
  int vehicle_id = 0;
  double issue_time = 0.0;
  std::vector<Vec2> path;
  std::vector<double> max_speed;  // one bound per path segment
  std::vector<AnchorPoint> anchors;
  /// Set when the rollout timed out before the vehicle crossed the
  /// intersection entry; the objective then only guides part of the way
  /// and cyclic replanning is required.
  bool timeout_no_anchor = false;

  bool operator==(const MotionPlanningObjective& o) const {
    return vehicle_id == o.vehicle_id && issue_time == o.issue_time &&
           path == o.path && max_speed == o.max_speed && anchors == o.anchors &&
           timeout_no_anchor == o.timeout_no_anchor;
  }
};

/// Lateral tolerance for anchor positions relative to the objective path.
inline constexpr double kAnchorLateralTolerance = 0.5;

/// Validates the structural invariants; returns a description of the first
/// violation, or nullopt if the objective is well formed.
std::optional<std::string> validate_objective(const MotionPlanningObjective& obj);

/// Validates id uniqueness, speeds and route fields of a snapshot.
std::optional<std::string> validate_environment(const EnvironmentModel& em);

}  // namespace aim
