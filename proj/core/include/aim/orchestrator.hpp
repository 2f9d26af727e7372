#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "aim/execsim.hpp"
#include "aim/motionplan.hpp"
#include "aim/policy.hpp"
#include "aim/rollout.hpp"
#include "aim/scenario.hpp"

namespace aim {

enum class TriggerKind { kInitial, kNewVehicle, kConflictRuledOut, kCyclic };
enum class RunMode { kSingle, kCyclic };

const char* to_string(TriggerKind kind);
const char* to_string(RunMode mode);
RunMode parse_run_mode(const std::string& s);

struct TriggerRecord {
  TriggerKind kind = TriggerKind::kInitial;
  double time = 0.0;
  int vehicle_id = -1;     // new-vehicle payload
  std::string detail;      // ruled-out payload
};

struct ObjectiveRecord {
  double time = 0.0;  // application time
  MotionPlanningObjective objective;
  bool planner_infeasible = false;
  bool follow_engaged = false;
};

struct WorldSample {
  double t = 0.0;
  int id = 0;
  Pose pose;
  double speed = 0.0;
  double accel = 0.0;
};

struct EpisodeLog {
  std::string scenario_name;
  std::string mode;
  std::string map_name;
  std::uint64_t seed = 0;
  std::vector<ScenarioVehicle> vehicles;  // scenario echo
  std::vector<TriggerRecord> triggers;
  std::vector<ObjectiveRecord> objectives;
  std::vector<WorldSample> world;  // one row per vehicle per execution step
  std::vector<CollisionEvent> collisions;
  std::vector<std::pair<double, int>> entries;  // intersection entry events
  std::vector<std::pair<double, int>> exits;
  std::vector<std::tuple<double, int, bool>> follow_events;  // engage toggles
  double end_time = 0.0;
  std::string end_status;  // completed | timeout | aborted
  std::string abort_reason;
};

struct EpisodeConfig {
  double timeout = 60.0;        // s
  double replan_period = 2.0;   // s, cyclic mode
  double planning_delay = 0.0;  // s, artificial latency between snapshot and issue
  double plan_horizon = 40.0;   // s, trajectory horizon floor
  std::string dump_rollout_dir;  // per-planning-run trace dumps when set
  RolloutConfig rollout;
  MotionPlannerConfig planner;
  CostWeights weights;
  ExecConfig exec;
};

/// Applies freshly derived objectives: each referenced CAV replans its
/// trajectory from its current state against the new objective, atomically
/// swapping at the step boundary. Objectives for unknown vehicles are
/// rejected. Records go to `log` when provided.
void apply_objectives(const std::vector<MotionPlanningObjective>& objectives,
                      WorldState& world, const EpisodeConfig& cfg, const LaneMap& map,
                      EpisodeLog* log);

/// Runs one closed-loop episode: trigger planning runs (initial, new
/// vehicle, plus cyclic timer and conflict rule-outs in cyclic mode),
/// dispatch objectives to the per-vehicle motion planners, and step the
/// world until every vehicle left the map or the episode times out.
EpisodeLog run_episode(const Scenario& scenario, const LaneMap& map, RunMode mode,
                       const Policy& policy, const EpisodeConfig& cfg, std::uint64_t seed);

/// Episode log round trip (delimited text, one record per line).
void write_episode_log(const EpisodeLog& log, std::ostream& out);
EpisodeLog read_episode_log(std::istream& in);
EpisodeLog read_episode_log_file(const std::string& path);

}  // namespace aim
