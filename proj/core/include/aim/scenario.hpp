#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "aim/envmodel.hpp"
#include "aim/lane_map.hpp"

namespace aim {

/// Initial state of one vehicle. `route` is the route actually driven; the
/// planner only learns it when the vehicle is controllable.
struct ScenarioVehicle {
  int id = 0;
  std::string lane;
  double arc = 0.0;    // m along the initial lane
  double speed = 0.0;  // m/s
  RouteSpec route;
  bool controllable = true;
  double spawn_time = 0.0;
  std::optional<double> scripted_speed;  // fixed-profile object vehicle

  bool operator==(const ScenarioVehicle& o) const {
    return id == o.id && lane == o.lane && arc == o.arc && speed == o.speed &&
           route == o.route && controllable == o.controllable &&
           spawn_time == o.spawn_time && scripted_speed == o.scripted_speed;
  }
};

struct Scenario {
  std::string name = "scenario";
  std::string map_name = "builtin";
  std::string type = "random";  // random | vil
  std::uint64_t seed = 0;
  std::vector<ScenarioVehicle> vehicles;

  bool operator==(const Scenario& o) const {
    return name == o.name && map_name == o.map_name && type == o.type && seed == o.seed &&
           vehicles == o.vehicles;
  }
};

/// Scenario file round trip; throws ParseError on malformed input.
Scenario load_scenario(std::istream& in);
Scenario load_scenario_file(const std::string& path);
void save_scenario(const Scenario& s, std::ostream& out);

/// Validity checks against a map: positions inside lane extents, connected
/// routes, no initial footprint overlaps.
std::vector<std::string> validate_scenario(const Scenario& s, const LaneMap& map);

struct ScenarioGenParams {
  double min_dist = 40.0;   // m upstream of the entry
  double max_dist = 60.0;
  double min_headway_gap = 12.0;  // m between two vehicles on one access
  double speed_lo = 0.7;    // fraction of the lane speed limit
  double speed_hi = 1.0;
  int max_vehicles = 6;
  int max_attempts = 100;
};

/// Random multi-agent scenarios: per access lane one or two vehicles at
/// 40-60 m upstream of the entry, initial speeds at 70-100 % of the lane
/// limit, routes uniform over the exits, 3-6 vehicles total. Deterministic
/// per seed.
std::vector<Scenario> generate_scenarios(const LaneMap& map, int count, std::uint64_t seed,
                                         const ScenarioGenParams& params = {});

/// Two-vehicle crossing setup: a controllable ego on the minor road and a
/// prioritized scripted object on the west access, both heading straight.
/// Distances are measured to the shared conflict point.
Scenario make_vil_scenario(const LaneMap& map, double ego_dist_to_conflict,
                           double ego_speed, double obj_dist_to_conflict,
                           double obj_speed);

}  // namespace aim
