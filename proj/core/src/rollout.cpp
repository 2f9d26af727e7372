#include "aim/rollout.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <stdexcept>

#include "aim/wire.hpp"

namespace aim {
namespace {

constexpr double kReachedMargin = 0.1;  // m before the route end
constexpr double kMinAnchorDt = 0.1;    // s, anchors closer than this are dropped

// Net heading change of a route through the intersection, used to order
// worst-case hypotheses straightest-first.
double route_turn_magnitude(const LaneMap& map, const RouteSpec& route) {
  const ApproachInfo info = approach_info(map, route);
  return std::abs(static_cast<double>(info.turn));
}

std::string route_key(const RouteSpec& r) {
  std::string key;
  for (const auto& lane : r.lanes) {
    key += lane;
    key += '|';
  }
  return key;
}

}  // namespace

double speed_advice(const RoutePath& path, double s, const SpeedAdviceParams& p) {
  const double len = path.poly.length();
  auto bound_at = [&](double ss) {
    const double limit = path.limit_at(ss);
    const double kappa = path.poly.curvature_at(ss);
    if (kappa > 1e-6) {
      return std::min(limit, std::sqrt(p.lat_accel_max / kappa));
    }
    return limit;
  };
  double advice = bound_at(s);
  for (double d = p.sample_step; d <= p.lookahead; d += p.sample_step) {
    const double ss = s + d;
    if (ss >= len) break;
    const double reachable =
        std::sqrt(bound_at(ss) * bound_at(ss) + 2.0 * p.comfort_decel * d);
    advice = std::min(advice, reachable);
  }
  return advice;
}

std::vector<RouteSpec> worst_case_routes(const Pose& pose, const LaneMap& map) {
  struct Candidate {
    const Lane* lane;
    double lateral;
  };
  std::vector<Candidate> candidates;
  double best_lateral = std::numeric_limits<double>::infinity();
  for (const auto& lane : map.lanes()) {
    const auto proj = project_to_lane(pose, lane);
    const double heading_err = std::abs(
        normalize_angle(pose.heading - lane.centerline.heading_at(proj.arc)));
    if (heading_err > kPi / 3) continue;
    best_lateral = std::min(best_lateral, std::abs(proj.lateral));
    if (std::abs(proj.lateral) <= kRouteLateralTolerance) {
      candidates.push_back({&lane, std::abs(proj.lateral)});
    }
  }
  if (candidates.empty()) {
    throw VehicleOffMapError(-1, best_lateral);
  }
  std::vector<RouteSpec> routes;
  std::map<std::string, bool> seen;
  for (const auto& c : candidates) {
    for (auto& r : map.routes_from(c.lane->id)) {
      const std::string key = route_key(r);
      if (!seen.count(key)) {
        seen[key] = true;
        routes.push_back(std::move(r));
      }
    }
  }
  std::stable_sort(routes.begin(), routes.end(), [&](const RouteSpec& a, const RouteSpec& b) {
    const double ta = route_turn_magnitude(map, a);
    const double tb = route_turn_magnitude(map, b);
    if (ta != tb) return ta < tb;
    return a.lanes < b.lanes;
  });
  return routes;
}

RoutePruning prune_routes(const Pose& pose, const std::vector<RouteSpec>& hypotheses,
                          const LaneMap& map) {
  RoutePruning out;
  for (const auto& r : hypotheses) {
    const RoutePath path = map.route_path(r);
    const auto proj = path.poly.project(pose.position());
    if (std::abs(proj.lateral) <= kRouteLateralTolerance) {
      out.kept.push_back(r);
    } else {
      out.ruled_out.push_back(r);
    }
  }
  return out;
}

RolloutState init_rollout(const EnvironmentModel& em, const LaneMap& map) {
  if (auto problem = validate_environment(em)) {
    throw std::invalid_argument("invalid environment model: " + *problem);
  }
  RolloutState state;
  state.t = 0.0;
  std::vector<const VehicleRecord*> ordered;
  for (const auto& v : em.vehicles) ordered.push_back(&v);
  std::sort(ordered.begin(), ordered.end(),
            [](const VehicleRecord* a, const VehicleRecord* b) { return a->id < b->id; });

  for (const VehicleRecord* rec : ordered) {
    SimVehicle sv;
    sv.id = rec->id;
    sv.controllable = rec->controllable;
    sv.pose = rec->pose;
    sv.speed = rec->speed;
    if (rec->route) {
      sv.hypotheses = {*rec->route};
    } else {
      try {
        sv.hypotheses = worst_case_routes(rec->pose, map);
      } catch (const VehicleOffMapError&) {
        throw VehicleOffMapError(rec->id, kRouteLateralTolerance);
      }
    }
    for (const auto& r : sv.hypotheses) {
      sv.paths.push_back(map.route_path(r));
    }
    sv.s = sv.paths.front().poly.project(rec->pose.position()).s;
    sv.reached = sv.s >= sv.paths.front().poly.length() - kReachedMargin;
    sv.buffer.push_back({0.0, sv.pose, sv.speed, 0.0, sv.s});
    state.vehicles.push_back(std::move(sv));
  }
  return state;
}

void rollout_step(RolloutState& state, const Policy& policy, const LaneMap& map,
                  const RolloutConfig& config) {
  // Observation of the current predicted scene (reached vehicles left out).
  EnvironmentModel em;
  em.timestamp = state.t;
  std::map<int, std::vector<RouteSpec>> assumed;
  for (const auto& sv : state.vehicles) {
    if (sv.reached) continue;
    VehicleRecord rec;
    rec.id = sv.id;
    rec.pose = sv.pose;
    rec.speed = sv.speed;
    rec.controllable = sv.controllable;
    rec.route = sv.hypotheses.front();
    em.vehicles.push_back(rec);
    assumed[sv.id] = sv.hypotheses;
  }

  JointAction policy_action;
  JointAction regular_action;
  ObservationGraph obs;
  if (!em.vehicles.empty()) {
    obs = build_observation(em, map, assumed);
    policy_action = policy.select_action(obs);
    regular_action = heuristic_reservation_policy(obs, config.regular);
  }

  for (auto& sv : state.vehicles) {
    if (sv.reached) {
      sv.buffer.push_back({state.t + config.dt, sv.pose, 0.0, 0.0, sv.s});
      continue;
    }
    const int vi = obs.vertex_index(sv.id);
    double accel = 0.0;
    if (vi >= 0) {
      accel = sv.controllable ? policy_action.accel[vi] : regular_action.accel[vi];
    }
    // The speed advice bounds the next-step speed.
    const RoutePath& path = sv.paths.front();
    const double advice = speed_advice(path, sv.s, config.advice);
    accel = std::min(accel, (advice - sv.speed) / config.dt);
    accel = std::max(accel, -kActionLimit);

    const double steer = pure_pursuit_steering(path.poly, sv.pose, sv.s, sv.speed,
                                               config.wheelbase, config.pursuit);
    const BicycleState next =
        bicycle_step({sv.pose, sv.speed}, accel, steer, config.wheelbase, config.dt);
    sv.pose = next.pose;
    sv.speed = next.speed;
    sv.s = path.poly.project(sv.pose.position()).s;
    if (sv.s >= path.poly.length() - kReachedMargin) {
      sv.reached = true;
    }
    // Hypotheses narrow as the simulated vehicle commits to a corridor.
    if (sv.hypotheses.size() > 1) {
      auto pruning = prune_routes(sv.pose, sv.hypotheses, map);
      if (!pruning.kept.empty() && pruning.kept.size() < sv.hypotheses.size()) {
        sv.hypotheses = std::move(pruning.kept);
        sv.paths.clear();
        for (const auto& r : sv.hypotheses) sv.paths.push_back(map.route_path(r));
        sv.s = sv.paths.front().poly.project(sv.pose.position()).s;
      }
    }
    sv.buffer.push_back({state.t + config.dt, sv.pose, sv.speed, accel, sv.s});
  }
  state.t += config.dt;
}

TerminationStatus termination_check(const RolloutState& state, const RolloutConfig& config) {
  bool all_reached = true;
  for (const auto& sv : state.vehicles) {
    if (!sv.reached) {
      all_reached = false;
      break;
    }
  }
  if (all_reached) return TerminationStatus::kDone;
  if (state.t >= config.timeout - 1e-9) return TerminationStatus::kTimeout;
  return TerminationStatus::kContinue;
}

namespace {

MotionPlanningObjective derive_objective(const SimVehicle& sv, double em_timestamp,
                                         double issue_time) {
  MotionPlanningObjective obj;
  obj.vehicle_id = sv.id;
  obj.issue_time = issue_time;

  const RoutePath& path = sv.paths.front();
  const double s0 = sv.buffer.front().s;
  const double len = path.poly.length();

  // Remaining route centerline from the snapshot position. Vehicles at the
  // very end of their route still get a short valid path.
  const double s_start = std::min(s0, std::max(len - 0.5, 0.0));
  const auto& pts = path.poly.points();
  const auto& cum = path.poly.cumulative();
  obj.path.push_back(path.poly.point_at(s_start));
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (cum[i] > s_start + 1e-6 && distance(obj.path.back(), pts[i]) > 1e-9) {
      obj.max_speed.push_back(path.seg_limit[i - 1]);
      obj.path.push_back(pts[i]);
    }
  }
  if (obj.path.size() < 2) {
    obj.path.insert(obj.path.begin(), path.poly.point_at(std::max(len - 1.0, 0.0)));
    obj.max_speed.push_back(path.seg_limit.back());
  }

  // One anchor at the intersection entry, read from the buffered rollout.
  const double entry = path.entry_arc;
  if (path.has_entry() && s0 < entry && entry < len) {
    bool crossed = false;
    for (std::size_t k = 1; k < sv.buffer.size(); ++k) {
      const auto& a = sv.buffer[k - 1];
      const auto& b = sv.buffer[k];
      if (a.s < entry && b.s >= entry) {
        const double frac = (entry - a.s) / std::max(b.s - a.s, 1e-9);
        const double t_cross = a.t + frac * (b.t - a.t);
        const double v_cross = a.speed + frac * (b.speed - a.speed);
        const double dt = (em_timestamp + t_cross) - issue_time;
        if (dt > kMinAnchorDt) {
          AnchorPoint ap;
          ap.position = path.poly.point_at(entry);
          ap.dt = dt;
          ap.speed = v_cross;
          obj.anchors.push_back(ap);
        }
        crossed = true;
        break;
      }
    }
    if (!crossed) {
      // The rollout ended before the vehicle reached the entry; the
      // objective guides only part of the way.
      obj.timeout_no_anchor = true;
    }
  }
  return obj;
}

}  // namespace

PlanResult plan(const EnvironmentModel& em, const LaneMap& map, const Policy& policy,
                const RolloutConfig& config, double issue_time) {
  PlanResult result;
  RolloutState state = init_rollout(em, map);
  TerminationStatus status = termination_check(state, config);
  int steps = 0;
  while (status == TerminationStatus::kContinue) {
    rollout_step(state, policy, map, config);
    ++steps;
    status = termination_check(state, config);
  }
  for (const auto& sv : state.vehicles) {
    if (!sv.controllable) continue;
    result.objectives.push_back(derive_objective(sv, em.timestamp, issue_time));
  }
  result.final_state = std::move(state);
  result.status = status;
  result.steps = steps;
  return result;
}

PlanResult plan(const EnvironmentModel& em, const LaneMap& map, const Policy& policy,
                const RolloutConfig& config) {
  return plan(em, map, policy, config, em.timestamp);
}

void dump_rollout_trace(const RolloutState& state, std::ostream& out) {
  out << "rollout_trace_v1\n";
  for (const auto& sv : state.vehicles) {
    out << "vehicle " << sv.id << " samples " << sv.buffer.size() << "\n";
    for (const auto& sample : sv.buffer) {
      out << format_double(sample.t) << " " << format_double(sample.pose.x) << " "
          << format_double(sample.pose.y) << " " << format_double(sample.pose.heading)
          << " " << format_double(sample.speed) << " " << format_double(sample.accel)
          << " " << format_double(sample.s) << "\n";
    }
  }
  out << "end\n";
}

}  // namespace aim
