#pragma once

#include <iosfwd>
#include <vector>

#include "aim/envmodel.hpp"
#include "aim/lane_map.hpp"
#include "aim/policy.hpp"
#include "aim/vehicle_model.hpp"

namespace aim {

struct SpeedAdviceParams {
  double lat_accel_max = 2.5;   // m/s^2 comfortable lateral acceleration
  double comfort_decel = 2.0;   // m/s^2 used for backward propagation
  double lookahead = 30.0;      // m
  double sample_step = 0.5;     // m
};

struct RolloutConfig {
  double dt = 0.2;           // s, 5 Hz policy cadence
  double timeout = 30.0;     // s, rollout horizon
  double wheelbase = 2.9;    // m
  PurePursuitParams pursuit;
  SpeedAdviceParams advice;
  HeuristicParams regular;   // behavior of non-controllable vehicles
};

/// One buffered trajectory sample of the built-in simulation, time relative
/// to the environment-model timestamp, stepped at the policy cadence.
struct RolloutSample {
  double t = 0.0;
  Pose pose;
  double speed = 0.0;
  double accel = 0.0;
  double s = 0.0;  // arc position on the driven route
};

/// Simulated vehicle state inside a planning run.
struct SimVehicle {
  int id = 0;
  bool controllable = false;
  Pose pose;
  double speed = 0.0;
  std::vector<RouteSpec> hypotheses;  // actual route for CAVs, worst case otherwise
  std::vector<RoutePath> paths;       // one per hypothesis; [0] is driven
  double s = 0.0;                     // arc position on the driven path
  std::vector<RolloutSample> buffer;
  bool reached = false;
};

struct RolloutState {
  double t = 0.0;  // relative to the snapshot timestamp
  std::vector<SimVehicle> vehicles;
};

enum class TerminationStatus { kContinue, kDone, kTimeout };

struct PlanResult {
  std::vector<MotionPlanningObjective> objectives;
  RolloutState final_state;
  TerminationStatus status = TerminationStatus::kDone;
  int steps = 0;
};

/// Curvature-anticipating upper speed bound: the minimum over the lookahead
/// window of curve speeds sqrt(a_lat/kappa) and segment speed limits,
/// backward-propagated under the comfort deceleration.
double speed_advice(const RoutePath& path, double s, const SpeedAdviceParams& p);

/// All topologically reachable routes through the intersection for a vehicle
/// with unknown intent, based on its pose. Throws VehicleOffMapError when no
/// lane matches. Routes are ordered straightest-first.
std::vector<RouteSpec> worst_case_routes(const Pose& pose, const LaneMap& map);

struct RoutePruning {
  std::vector<RouteSpec> kept;
  std::vector<RouteSpec> ruled_out;
};

/// Splits hypotheses into those still consistent with the pose (lateral
/// offset within tolerance) and those ruled out.
RoutePruning prune_routes(const Pose& pose, const std::vector<RouteSpec>& hypotheses,
                          const LaneMap& map);

/// Lateral offset beyond which a route hypothesis is ruled out.
inline constexpr double kRouteLateralTolerance = 1.5;

/// Initializes the built-in simulator from a snapshot.
RolloutState init_rollout(const EnvironmentModel& em, const LaneMap& map);

/// Advances the built-in simulation by one policy step: observe, select the
/// joint action (policy for controllable vehicles, priority rules for
/// regular ones), clip against the speed advice, steer by pure pursuit, and
/// integrate the kinematic bicycle model.
void rollout_step(RolloutState& state, const Policy& policy, const LaneMap& map,
                  const RolloutConfig& config);

TerminationStatus termination_check(const RolloutState& state, const RolloutConfig& config);

/// Algorithm: instantiate the snapshot in the built-in simulator, roll the
/// scene forward under the policy until every vehicle reached its
/// destination or the timeout fires, then derive one MP objective per
/// controllable vehicle from the buffered trajectories. Anchor durations are
/// measured from `issue_time` so that planning latency is compensated.
PlanResult plan(const EnvironmentModel& em, const LaneMap& map, const Policy& policy,
                const RolloutConfig& config, double issue_time);
PlanResult plan(const EnvironmentModel& em, const LaneMap& map, const Policy& policy,
                const RolloutConfig& config);

/// Per-step rollout trace (poses, speeds, actions) as structured text.
void dump_rollout_trace(const RolloutState& state, std::ostream& out);

}  // namespace aim
