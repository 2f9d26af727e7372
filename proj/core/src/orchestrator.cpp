#include "aim/orchestrator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>

namespace aim {

const char* to_string(TriggerKind kind) {
  switch (kind) {
    case TriggerKind::kInitial: return "initial";
    case TriggerKind::kNewVehicle: return "new-vehicle";
    case TriggerKind::kConflictRuledOut: return "conflict-ruled-out";
    case TriggerKind::kCyclic: return "cyclic";
  }
  return "?";
}

const char* to_string(RunMode mode) {
  return mode == RunMode::kSingle ? "single" : "cyclic";
}

RunMode parse_run_mode(const std::string& s) {
  if (s == "single") return RunMode::kSingle;
  if (s == "cyclic") return RunMode::kCyclic;
  throw std::invalid_argument("unknown mode '" + s + "' (expected single|cyclic)");
}

namespace {

WorldState init_world(const Scenario& scenario, const LaneMap& map, std::uint64_t seed) {
  WorldState world;
  world.seed = seed;
  for (const auto& sv : scenario.vehicles) {
    const Lane* lane = map.find(sv.lane);
    if (!lane) throw std::invalid_argument("scenario references unknown lane '" + sv.lane + "'");
    WorldVehicle v;
    v.id = sv.id;
    v.controllable = sv.controllable;
    v.drive_route = sv.route;
    v.drive_path = map.route_path(sv.route);
    const auto lane_start = v.drive_path.lane_start.find(sv.lane);
    v.s = (lane_start != v.drive_path.lane_start.end() ? lane_start->second : 0.0) + sv.arc;
    const Vec2 p = v.drive_path.poly.point_at(v.s);
    v.pose = {p.x, p.y, v.drive_path.poly.heading_at(v.s)};
    v.speed = sv.speed;
    if (sv.controllable) v.declared_route = sv.route;
    v.scripted_speed = sv.scripted_speed;
    v.spawn_time = sv.spawn_time;
    v.active = sv.spawn_time <= 0.0;
    world.vehicles.push_back(std::move(v));
  }
  std::sort(world.vehicles.begin(), world.vehicles.end(),
            [](const WorldVehicle& a, const WorldVehicle& b) { return a.id < b.id; });
  return world;
}

std::optional<LeadInfo> find_lead(const WorldVehicle& ego, const Polyline& path,
                                  double ego_arc, const WorldState& world,
                                  const EpisodeConfig& cfg) {
  std::optional<LeadInfo> lead;
  double best_gap = cfg.planner.follow_range + 1.0;
  for (const auto& other : world.vehicles) {
    if (other.id == ego.id || !other.active || other.exited) continue;
    const auto proj = path.project(other.pose.position());
    if (std::abs(proj.lateral) > 1.5) continue;
    // A lead vehicle travels along the path; crossing traffic that briefly
    // passes near it must not engage follow mode.
    const double heading_err =
        std::abs(normalize_angle(other.pose.heading - path.heading_at(proj.s)));
    if (heading_err > kPi / 4) continue;
    const double ds = proj.s - ego_arc;
    if (ds <= 0.1) continue;
    const double gap = ds - cfg.exec.vehicle_length;  // bumper to bumper
    if (gap < best_gap) {
      best_gap = gap;
      lead = LeadInfo{std::max(gap, 0.0), other.speed};
    }
  }
  if (lead && lead->gap <= cfg.planner.follow_range) return lead;
  return std::nullopt;
}

}  // namespace

void apply_objectives(const std::vector<MotionPlanningObjective>& objectives,
                      WorldState& world, const EpisodeConfig& cfg, const LaneMap& map,
                      EpisodeLog* log) {
  (void)map;
  for (const auto& obj : objectives) {
    WorldVehicle* vehicle = nullptr;
    for (auto& v : world.vehicles) {
      if (v.id == obj.vehicle_id) {
        vehicle = &v;
        break;
      }
    }
    if (!vehicle || !vehicle->controllable || vehicle->exited) {
      if (log) {
        TriggerRecord rejected;
        rejected.kind = TriggerKind::kInitial;
        rejected.time = world.t;
        rejected.vehicle_id = obj.vehicle_id;
        rejected.detail = "objective-rejected";
        log->triggers.push_back(rejected);
      }
      continue;
    }

    const Polyline path(obj.path);
    const auto proj = path.project(vehicle->pose.position());
    EgoState ego;
    ego.arc = proj.s;
    ego.speed = vehicle->speed;
    ego.accel = std::clamp(vehicle->accel, -cfg.planner.hard_accel, cfg.planner.hard_accel);

    const auto lead = find_lead(*vehicle, path, proj.s, world, cfg);
    double horizon = cfg.plan_horizon;
    if (!obj.anchors.empty()) horizon = std::max(horizon, obj.anchors.front().dt + 5.0);

    Trajectory traj = plan_trajectory(obj, ego, lead, cfg.weights, cfg.planner, horizon);

    const bool was_following = vehicle->traj && vehicle->traj->trajectory.follow_mode;
    if (log && was_following != traj.follow_mode) {
      log->follow_events.push_back({world.t, vehicle->id, traj.follow_mode});
    }
    vehicle->traj = ActiveTrajectory{std::move(traj), path, world.t};
    if (log) {
      ObjectiveRecord rec;
      rec.time = world.t;
      rec.objective = obj;
      rec.planner_infeasible = vehicle->traj->trajectory.infeasible;
      rec.follow_engaged = vehicle->traj->trajectory.follow_mode;
      log->objectives.push_back(rec);
    }
  }
}

EpisodeLog run_episode(const Scenario& scenario, const LaneMap& map, RunMode mode,
                       const Policy& policy, const EpisodeConfig& cfg, std::uint64_t seed) {
  EpisodeLog log;
  log.scenario_name = scenario.name;
  log.mode = to_string(mode);
  log.map_name = map.name();
  log.seed = seed;
  log.vehicles = scenario.vehicles;

  WorldState world = init_world(scenario, map, seed);
  const long steps_per_cycle =
      std::max(1L, std::lround(cfg.replan_period / cfg.exec.dt));
  const long max_steps = std::lround(cfg.timeout / cfg.exec.dt);

  // Worst-case route hypotheses the planner holds for unknown-intent
  // vehicles; pruning one triggers replanning in cyclic mode.
  std::map<int, std::vector<RouteSpec>> hypotheses;
  std::set<int> seen_vehicles;
  std::set<int> entered;
  std::set<std::pair<int, int>> collided;

  struct PendingPlan {
    long apply_step = 0;
    std::vector<MotionPlanningObjective> objectives;
  };
  std::vector<PendingPlan> pending;

  auto run_planning = [&](TriggerKind kind, int vehicle_id, const std::string& detail) {
    TriggerRecord trig;
    trig.kind = kind;
    trig.time = world.t;
    trig.vehicle_id = vehicle_id;
    trig.detail = detail;
    log.triggers.push_back(trig);

    const EnvironmentModel em = snapshot(world);
    if (em.vehicles.empty()) return;
    const double issue_time = em.timestamp + cfg.planning_delay;
    PlanResult result = plan(em, map, policy, cfg.rollout, issue_time);
    if (!cfg.dump_rollout_dir.empty()) {
      std::filesystem::create_directories(cfg.dump_rollout_dir);
      char name[128];
      std::snprintf(name, sizeof(name), "%s_%s_plan_%06ld.trace",
                    scenario.name.c_str(), to_string(mode), world.step);
      std::ofstream trace(std::filesystem::path(cfg.dump_rollout_dir) / name);
      dump_rollout_trace(result.final_state, trace);
    }
    PendingPlan plan_record;
    plan_record.apply_step =
        world.step + std::max(0L, std::lround(cfg.planning_delay / cfg.exec.dt));
    plan_record.objectives = std::move(result.objectives);
    pending.push_back(std::move(plan_record));
  };

  try {
    bool done = false;
    while (!done) {
      // Trigger evaluation at the step boundary.
      for (const auto& v : world.vehicles) {
        if (v.active && !seen_vehicles.count(v.id)) {
          seen_vehicles.insert(v.id);
          if (world.step == 0) continue;  // covered by the initial run
          run_planning(TriggerKind::kNewVehicle, v.id, "");
        }
      }
      if (world.step == 0) {
        run_planning(TriggerKind::kInitial, -1, "");
      } else if (mode == RunMode::kCyclic && world.step % steps_per_cycle == 0) {
        run_planning(TriggerKind::kCyclic, -1, "");
      }
      if (mode == RunMode::kCyclic) {
        for (const auto& v : world.vehicles) {
          if (!v.active || v.exited || v.declared_route) continue;
          auto it = hypotheses.find(v.id);
          if (it == hypotheses.end()) {
            hypotheses[v.id] = worst_case_routes(v.pose, map);
            continue;
          }
          if (it->second.size() <= 1) continue;
          auto pruning = prune_routes(v.pose, it->second, map);
          if (!pruning.ruled_out.empty() && !pruning.kept.empty()) {
            it->second = pruning.kept;
            std::string detail = "route";
            for (const auto& r : pruning.ruled_out) {
              detail += ":" + r.lanes.back();
            }
            run_planning(TriggerKind::kConflictRuledOut, v.id, detail);
          }
        }
      }

      // Objective handover at the step boundary.
      for (auto it = pending.begin(); it != pending.end();) {
        if (it->apply_step <= world.step) {
          apply_objectives(it->objectives, world, cfg, map, &log);
          it = pending.erase(it);
        } else {
          ++it;
        }
      }

      step_world(world, map, cfg.exec);

      for (const auto& v : world.vehicles) {
        if (!v.active || v.exited) continue;
        log.world.push_back({world.t, v.id, v.pose, v.speed, v.accel});
        if (!entered.count(v.id) && map.inside_intersection(v.pose.position())) {
          entered.insert(v.id);
          log.entries.push_back({world.t, v.id});
        }
      }
      for (auto& event : detect_collisions(world, cfg.exec)) {
        // One record per colliding pair; later steps of the same contact
        // add nothing for the evaluation.
        if (collided.insert({event.id_a, event.id_b}).second) {
          log.collisions.push_back(event);
        }
      }
      for (const auto& v : world.vehicles) {
        if (v.exited && v.active == false) {
          bool already = false;
          for (const auto& [t, id] : log.exits) {
            if (id == v.id) {
              already = true;
              break;
            }
          }
          if (!already) log.exits.push_back({world.t, v.id});
        }
      }

      bool all_exited = true;
      for (const auto& v : world.vehicles) {
        if (!v.exited) {
          all_exited = false;
          break;
        }
      }
      if (all_exited) {
        log.end_status = "completed";
        done = true;
      } else if (world.step >= max_steps) {
        log.end_status = "timeout";
        done = true;
      }
    }
  } catch (const std::exception& e) {
    log.end_status = "aborted";
    log.abort_reason = e.what();
  }
  log.end_time = world.t;
  return log;
}

}  // namespace aim
