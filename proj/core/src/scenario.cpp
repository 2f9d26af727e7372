#include "aim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "aim/execsim.hpp"
#include "aim/wire.hpp"
#include "text_io.hpp"

namespace aim {
namespace {

// Uniform helpers on top of the engine output, stable across library
// implementations so seeded runs stay byte-identical.
double u01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}
double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + u01(rng) * (hi - lo);
}
std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t n) {
  return rng() % n;
}

}  // namespace

Scenario load_scenario(std::istream& in) {
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  detail::LineScanner scan(std::move(data));
  std::string line;
  std::size_t at = 0;

  if (!scan.next(line, at)) throw ParseError("format_version", 0, "empty scenario document");
  auto toks = detail::split_ws(line);
  if (toks.size() != 2 || toks[0] != "format_version") {
    throw ParseError("format_version", at, "expected 'format_version <n>'");
  }
  if (detail::parse_int(toks[1], "format_version", at) != 1) {
    throw ParseError("format_version", at, "unsupported version " + toks[1]);
  }

  Scenario s;
  while (scan.next(line, at)) {
    toks = detail::split_ws(line);
    const std::string& key = toks[0];
    if (key == "name" && toks.size() == 2) {
      s.name = toks[1];
    } else if (key == "map" && toks.size() == 2) {
      s.map_name = toks[1];
    } else if (key == "type" && toks.size() == 2) {
      s.type = toks[1];
    } else if (key == "seed" && toks.size() == 2) {
      s.seed = static_cast<std::uint64_t>(detail::parse_int(toks[1], "seed", at));
    } else if (key == "vehicle") {
      if (toks.size() < 2) throw ParseError("vehicle", at, "missing vehicle id");
      ScenarioVehicle v;
      v.id = static_cast<int>(detail::parse_int(toks[1], "vehicle", at));
      for (std::size_t i = 2; i + 1 < toks.size(); i += 2) {
        const std::string& k = toks[i];
        const std::string& val = toks[i + 1];
        if (k == "lane") {
          v.lane = val;
        } else if (k == "arc") {
          v.arc = detail::parse_double(val, "arc", at);
        } else if (k == "speed") {
          v.speed = detail::parse_double(val, "speed", at);
        } else if (k == "route") {
          v.route.lanes = detail::split_on(val, ',');
        } else if (k == "controllable") {
          v.controllable = detail::parse_int(val, "controllable", at) != 0;
        } else if (k == "spawn") {
          v.spawn_time = detail::parse_double(val, "spawn", at);
        } else if (k == "script") {
          v.scripted_speed = detail::parse_double(val, "script", at);
        } else {
          throw ParseError(k, at, "unknown vehicle attribute");
        }
      }
      if (v.lane.empty()) throw ParseError("vehicle", at, "vehicle needs a lane");
      if (v.route.lanes.empty()) throw ParseError("vehicle", at, "vehicle needs a route");
      s.vehicles.push_back(std::move(v));
    } else {
      throw ParseError(key, at, "unknown directive");
    }
  }
  return s;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file '" + path + "'");
  return load_scenario(in);
}

void save_scenario(const Scenario& s, std::ostream& out) {
  out << "format_version 1\n";
  out << "name " << s.name << "\n";
  out << "map " << s.map_name << "\n";
  out << "type " << s.type << "\n";
  out << "seed " << s.seed << "\n";
  for (const auto& v : s.vehicles) {
    out << "vehicle " << v.id << " lane " << v.lane << " arc " << format_double(v.arc)
        << " speed " << format_double(v.speed) << " route ";
    for (std::size_t i = 0; i < v.route.lanes.size(); ++i) {
      if (i) out << ",";
      out << v.route.lanes[i];
    }
    out << " controllable " << (v.controllable ? 1 : 0) << " spawn "
        << format_double(v.spawn_time);
    if (v.scripted_speed) out << " script " << format_double(*v.scripted_speed);
    out << "\n";
  }
}

std::vector<std::string> validate_scenario(const Scenario& s, const LaneMap& map) {
  std::vector<std::string> problems;
  std::vector<std::pair<Pose, int>> poses;
  for (const auto& v : s.vehicles) {
    const Lane* lane = map.find(v.lane);
    if (!lane) {
      problems.push_back("vehicle " + std::to_string(v.id) + ": unknown lane '" + v.lane + "'");
      continue;
    }
    if (v.arc < 0.0 || v.arc > lane->centerline.length()) {
      problems.push_back("vehicle " + std::to_string(v.id) + ": arc outside lane extent");
    }
    if (v.speed < 0.0) {
      problems.push_back("vehicle " + std::to_string(v.id) + ": negative speed");
    }
    if (v.route.lanes.empty() || v.route.lanes.front() != v.lane) {
      problems.push_back("vehicle " + std::to_string(v.id) + ": route must start on its lane");
    } else {
      try {
        map.route_path(v.route);
      } catch (const std::exception& e) {
        problems.push_back("vehicle " + std::to_string(v.id) + ": " + e.what());
      }
    }
    if (v.spawn_time == 0.0 && lane) {
      const Vec2 p = lane->centerline.point_at(v.arc);
      poses.push_back({{p.x, p.y, lane->centerline.heading_at(v.arc)}, v.id});
    }
  }
  for (std::size_t i = 0; i < poses.size(); ++i) {
    for (std::size_t j = i + 1; j < poses.size(); ++j) {
      if (box_clearance(poses[i].first, poses[j].first, 5.0, 2.0) <= 0.0) {
        problems.push_back("vehicles " + std::to_string(poses[i].second) + " and " +
                           std::to_string(poses[j].second) + " overlap initially");
      }
    }
  }
  return problems;
}

std::vector<Scenario> generate_scenarios(const LaneMap& map, int count, std::uint64_t seed,
                                         const ScenarioGenParams& p) {
  std::vector<std::string> accesses;
  for (const auto& lane : map.lanes()) {
    if (map.is_access(lane.id)) accesses.push_back(lane.id);
  }
  std::sort(accesses.begin(), accesses.end());
  if (accesses.size() < 2) {
    throw std::invalid_argument("scenario generation needs at least 2 access lanes");
  }

  std::mt19937_64 rng(seed);
  std::vector<Scenario> out;
  out.reserve(static_cast<std::size_t>(count));

  for (int sc = 0; sc < count; ++sc) {
    Scenario scenario;
    scenario.name = "random_" + std::to_string(sc);
    scenario.map_name = map.name();
    scenario.type = "random";
    scenario.seed = seed;

    bool ok = false;
    for (int attempt = 0; attempt < p.max_attempts && !ok; ++attempt) {
      scenario.vehicles.clear();
      int next_id = 1;
      int total = 0;
      std::vector<int> per_access(accesses.size());
      for (std::size_t ai = 0; ai < accesses.size(); ++ai) {
        per_access[ai] = 1 + static_cast<int>(uniform_index(rng, 2));
        total += per_access[ai];
      }
      if (total > p.max_vehicles) continue;

      bool placed = true;
      for (std::size_t ai = 0; ai < accesses.size() && placed; ++ai) {
        const Lane* lane = map.find(accesses[ai]);
        const double entry = lane->centerline.length();
        std::vector<double> dists;
        if (per_access[ai] == 1) {
          dists.push_back(uniform(rng, p.min_dist, p.max_dist));
        } else {
          bool pair_ok = false;
          for (int tries = 0; tries < p.max_attempts; ++tries) {
            const double d1 = uniform(rng, p.min_dist, p.max_dist);
            const double d2 = uniform(rng, p.min_dist, p.max_dist);
            if (std::abs(d1 - d2) >= p.min_headway_gap) {
              dists = {std::min(d1, d2), std::max(d1, d2)};
              pair_ok = true;
              break;
            }
          }
          if (!pair_ok) {
            placed = false;
            break;
          }
        }
        const auto routes = map.routes_from(accesses[ai]);
        for (double d : dists) {
          ScenarioVehicle v;
          v.id = next_id++;
          v.lane = accesses[ai];
          v.arc = entry - d;
          v.speed = uniform(rng, p.speed_lo, p.speed_hi) * lane->speed_limit;
          v.route = routes[uniform_index(rng, routes.size())];
          v.controllable = true;
          scenario.vehicles.push_back(std::move(v));
        }
      }
      if (!placed) continue;
      ok = validate_scenario(scenario, map).empty();
    }
    if (!ok) {
      throw std::runtime_error("scenario generation failed after " +
                               std::to_string(p.max_attempts) + " attempts");
    }
    out.push_back(std::move(scenario));
  }
  return out;
}

Scenario make_vil_scenario(const LaneMap& map, double ego_dist_to_conflict,
                           double ego_speed, double obj_dist_to_conflict,
                           double obj_speed) {
  const RouteSpec ego_route{{"s_in", "s_n", "n_out"}};
  const RouteSpec obj_route{{"w_in", "w_e", "e_out"}};
  const auto conflicts = map.shared_conflicts(ego_route, obj_route);
  double ego_conf = -1.0, obj_conf = -1.0;
  for (const auto& c : conflicts) {
    if (c.kind == ConflictKind::kCrossing) {
      ego_conf = c.s_on_a;
      obj_conf = c.s_on_b;
      break;
    }
  }
  if (ego_conf < 0.0) {
    throw std::runtime_error("map does not expose the crossing used by the vil scenario");
  }

  Scenario s;
  s.name = "vil";
  s.map_name = map.name();
  s.type = "vil";

  ScenarioVehicle ego;
  ego.id = 1;
  ego.lane = "s_in";
  ego.arc = ego_conf - ego_dist_to_conflict;
  ego.speed = ego_speed;
  ego.route = ego_route;
  ego.controllable = true;
  s.vehicles.push_back(ego);

  ScenarioVehicle obj;
  obj.id = 2;
  obj.lane = "w_in";
  obj.arc = obj_conf - obj_dist_to_conflict;
  obj.speed = obj_speed;
  obj.route = obj_route;
  obj.controllable = false;
  obj.scripted_speed = obj_speed;
  s.vehicles.push_back(obj);
  return s;
}

}  // namespace aim
