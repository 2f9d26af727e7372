#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "aim/envmodel.hpp"
#include "aim/lane_map.hpp"
#include "aim/motionplan.hpp"
#include "aim/policy.hpp"
#include "aim/vehicle_model.hpp"

namespace aim {

struct ExecConfig {
  double dt = 0.02;        // s, 50 Hz execution step
  double wheelbase = 2.9;  // m
  double k_pos = 4.0;      // 1/s^2, longitudinal position tracking gain
  double k_speed = 4.0;    // 1/s, speed tracking gain
  double actuator_limit = 4.0;  // m/s^2
  double vehicle_length = 5.0;
  double vehicle_width = 2.0;
  double regular_period = 0.2;  // s, decision cadence of regular vehicles
  PurePursuitParams pursuit;
  HeuristicParams regular;  // rule set of priority-rule-following vehicles
};

/// Trajectory a CAV is currently tracking, anchored at activation time.
struct ActiveTrajectory {
  Trajectory trajectory;
  Polyline path;   // objective path the samples refer to
  double t0 = 0.0;  // world time at trajectory t = 0
};

struct WorldVehicle {
  int id = 0;
  bool controllable = false;
  Pose pose;
  double speed = 0.0;
  double accel = 0.0;
  std::optional<RouteSpec> declared_route;  // known to the planner via V2I
  RouteSpec drive_route;                    // route actually driven
  RoutePath drive_path;
  double s = 0.0;  // arc on drive_path
  std::optional<double> scripted_speed;  // fixed-profile object vehicles
  std::optional<ActiveTrajectory> traj;
  double spawn_time = 0.0;
  bool active = false;
  bool exited = false;
  double held_accel = 0.0;     // regular vehicles hold commands between decisions
  double next_decision = 0.0;
};

/// Bounding boxes of the two vehicles intersected during one step.
struct CollisionEvent {
  double t = 0.0;
  int id_a = 0;
  int id_b = 0;
  double penetration = 0.0;  // m
};

struct WorldState {
  double t = 0.0;
  long step = 0;
  std::uint64_t seed = 0;
  std::vector<WorldVehicle> vehicles;
};

/// Advances the world by one execution step: CAVs track their trajectories
/// (longitudinal PI + feedforward, lateral pure pursuit), scripted objects
/// regulate their fixed speed, regular vehicles follow priority rules at the
/// policy cadence, and every vehicle integrates the single-track model.
void step_world(WorldState& state, const LaneMap& map, const ExecConfig& cfg);

/// Exact separating-axis intersection test over all active vehicle pairs
/// with 5 m x 2 m footprints centered at each pose.
std::vector<CollisionEvent> detect_collisions(const WorldState& state, const ExecConfig& cfg);

/// Corners of the oriented footprint box.
std::array<Vec2, 4> footprint(const Pose& pose, double length, double width);

/// Signed clearance between two footprints: minimum separation when
/// disjoint, negative penetration depth when intersecting.
double box_clearance(const Pose& a, const Pose& b, double length, double width);

/// Read-only environment-model snapshot of the active vehicles. Controllable
/// vehicles declare their remaining route; others are reported without one
/// unless `expose_regular_routes` is set.
EnvironmentModel snapshot(const WorldState& state, bool expose_regular_routes = false);

}  // namespace aim
