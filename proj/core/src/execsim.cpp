#include "aim/execsim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "aim/scenegraph.hpp"

namespace aim {
namespace {

constexpr double kExitMargin = 0.1;

// Remaining route from the lane currently under the vehicle.
RouteSpec remaining_route(const WorldVehicle& v) {
  const std::string& cur = v.drive_path.lane_at(v.s);
  RouteSpec out;
  bool seen = false;
  for (const auto& lane : v.drive_route.lanes) {
    if (lane == cur) seen = true;
    if (seen) out.lanes.push_back(lane);
  }
  if (out.lanes.empty()) out = v.drive_route;
  return out;
}

// Reference state on the tracked trajectory at world time t, extrapolating
// at constant speed beyond the horizon.
void trajectory_reference(const ActiveTrajectory& at, double t, double* s_ref,
                          double* v_ref, double* a_ff) {
  const auto& samples = at.trajectory.samples;
  const double rel = t - at.t0;
  if (samples.empty()) {
    *s_ref = 0.0;
    *v_ref = 0.0;
    *a_ff = 0.0;
    return;
  }
  if (rel <= 0.0) {
    *s_ref = samples.front().arc;
    *v_ref = samples.front().speed;
    *a_ff = samples.front().accel;
    return;
  }
  if (rel >= samples.back().t) {
    const auto& last = samples.back();
    *s_ref = last.arc + last.speed * (rel - last.t);
    *v_ref = last.speed;
    *a_ff = 0.0;
    return;
  }
  std::size_t lo = 0;
  std::size_t hi = samples.size() - 1;
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    if (samples[mid].t <= rel) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const auto& a = samples[lo];
  const auto& b = samples[hi];
  const double frac = (rel - a.t) / std::max(b.t - a.t, 1e-9);
  *s_ref = a.arc + frac * (b.arc - a.arc);
  *v_ref = a.speed + frac * (b.speed - a.speed);
  *a_ff = a.accel;
}

}  // namespace

EnvironmentModel snapshot(const WorldState& state, bool expose_regular_routes) {
  EnvironmentModel em;
  em.timestamp = state.t;
  for (const auto& v : state.vehicles) {
    if (!v.active || v.exited) continue;
    VehicleRecord rec;
    rec.id = v.id;
    rec.pose = v.pose;
    rec.speed = v.speed;
    rec.controllable = v.controllable;
    if (v.controllable || expose_regular_routes) {
      rec.route = remaining_route(v);
    } else if (v.declared_route) {
      rec.route = v.declared_route;
    }
    em.vehicles.push_back(rec);
  }
  std::sort(em.vehicles.begin(), em.vehicles.end(),
            [](const VehicleRecord& a, const VehicleRecord& b) { return a.id < b.id; });
  return em;
}

void step_world(WorldState& state, const LaneMap& map, const ExecConfig& cfg) {
  // Activations.
  for (auto& v : state.vehicles) {
    if (!v.active && !v.exited && v.spawn_time <= state.t + 1e-9) {
      v.active = true;
    }
  }

  // Regular vehicles decide at the policy cadence on the actual scene.
  bool need_decision = false;
  for (const auto& v : state.vehicles) {
    if (v.active && !v.controllable && !v.scripted_speed && state.t + 1e-9 >= v.next_decision) {
      need_decision = true;
      break;
    }
  }
  if (need_decision) {
    const EnvironmentModel em = snapshot(state, /*expose_regular_routes=*/true);
    std::map<int, std::vector<RouteSpec>> assumed;
    for (const auto& rec : em.vehicles) {
      assumed[rec.id] = {*rec.route};
    }
    const ObservationGraph obs = build_observation(em, map, assumed);
    const JointAction action = heuristic_reservation_policy(obs, cfg.regular);
    for (auto& v : state.vehicles) {
      if (!v.active || v.controllable || v.scripted_speed) continue;
      if (state.t + 1e-9 < v.next_decision) continue;
      const int vi = obs.vertex_index(v.id);
      v.held_accel = vi >= 0 ? action.accel[vi] : 0.0;
      v.next_decision = state.t + cfg.regular_period;
    }
  }

  for (auto& v : state.vehicles) {
    if (!v.active || v.exited) continue;

    double accel = 0.0;
    double steer = 0.0;
    if (v.controllable && v.traj) {
      double s_ref, v_ref, a_ff;
      trajectory_reference(*v.traj, state.t, &s_ref, &v_ref, &a_ff);
      const double s_meas = v.traj->path.project(v.pose.position()).s;
      accel = a_ff + cfg.k_pos * (s_ref - s_meas) + cfg.k_speed * (v_ref - v.speed);
      accel = std::clamp(accel, -cfg.actuator_limit, cfg.actuator_limit);
      steer = pure_pursuit_steering(v.traj->path, v.pose, s_meas, v.speed, cfg.wheelbase,
                                    cfg.pursuit);
    } else if (v.scripted_speed) {
      accel = std::clamp(1.0 * (*v.scripted_speed - v.speed), -kActionLimit, kActionLimit);
      steer = pure_pursuit_steering(v.drive_path.poly, v.pose, v.s, v.speed, cfg.wheelbase,
                                    cfg.pursuit);
    } else {
      accel = v.held_accel;
      steer = pure_pursuit_steering(v.drive_path.poly, v.pose, v.s, v.speed, cfg.wheelbase,
                                    cfg.pursuit);
    }

    const BicycleState next =
        bicycle_step({v.pose, v.speed}, accel, steer, cfg.wheelbase, cfg.dt);
    v.pose = next.pose;
    v.accel = (next.speed - v.speed) / cfg.dt;  // realized, after the v >= 0 floor
    v.speed = next.speed;
    v.s = v.drive_path.poly.project(v.pose.position()).s;
    if (v.s >= v.drive_path.poly.length() - kExitMargin) {
      v.exited = true;
      v.active = false;
    }
  }

  ++state.step;
  state.t = static_cast<double>(state.step) * cfg.dt;
}

std::array<Vec2, 4> footprint(const Pose& pose, double length, double width) {
  const double c = std::cos(pose.heading);
  const double s = std::sin(pose.heading);
  const Vec2 fwd{c * length / 2.0, s * length / 2.0};
  const Vec2 side{-s * width / 2.0, c * width / 2.0};
  const Vec2 ctr = pose.position();
  return {ctr + fwd + side, ctr + fwd - side, ctr - fwd - side, ctr - fwd + side};
}

namespace {

// Separating-axis test; returns penetration depth (> 0) or -1 if disjoint.
double sat_penetration(const std::array<Vec2, 4>& a, const std::array<Vec2, 4>& b) {
  double penetration = std::numeric_limits<double>::infinity();
  const std::array<const std::array<Vec2, 4>*, 2> boxes{&a, &b};
  for (const auto* box : boxes) {
    for (int e = 0; e < 2; ++e) {
      const Vec2 edge = (*box)[e + 1] - (*box)[e];
      const double len = norm(edge);
      const Vec2 axis{edge.y / len, -edge.x / len};
      double min_a = 1e18, max_a = -1e18, min_b = 1e18, max_b = -1e18;
      for (const auto& p : a) {
        const double d = dot(axis, p);
        min_a = std::min(min_a, d);
        max_a = std::max(max_a, d);
      }
      for (const auto& p : b) {
        const double d = dot(axis, p);
        min_b = std::min(min_b, d);
        max_b = std::max(max_b, d);
      }
      const double overlap = std::min(max_a, max_b) - std::max(min_a, min_b);
      if (overlap <= 0.0) return -1.0;
      penetration = std::min(penetration, overlap);
    }
  }
  return penetration;
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double t = std::clamp(dot(p - a, ab) / dot(ab, ab), 0.0, 1.0);
  return distance(p, a + ab * t);
}

}  // namespace

double box_clearance(const Pose& a, const Pose& b, double length, double width) {
  const auto fa = footprint(a, length, width);
  const auto fb = footprint(b, length, width);
  const double pen = sat_penetration(fa, fb);
  if (pen >= 0.0) return -pen;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      best = std::min(best, point_segment_distance(fa[i], fb[j], fb[(j + 1) % 4]));
      best = std::min(best, point_segment_distance(fb[i], fa[j], fa[(j + 1) % 4]));
    }
  }
  return best;
}

std::vector<CollisionEvent> detect_collisions(const WorldState& state, const ExecConfig& cfg) {
  std::vector<CollisionEvent> events;
  const auto& vs = state.vehicles;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (!vs[i].active || vs[i].exited) continue;
    for (std::size_t j = i + 1; j < vs.size(); ++j) {
      if (!vs[j].active || vs[j].exited) continue;
      const auto fa = footprint(vs[i].pose, cfg.vehicle_length, cfg.vehicle_width);
      const auto fb = footprint(vs[j].pose, cfg.vehicle_length, cfg.vehicle_width);
      const double pen = sat_penetration(fa, fb);
      if (pen >= 0.0) {
        events.push_back({state.t, std::min(vs[i].id, vs[j].id),
                          std::max(vs[i].id, vs[j].id), pen});
      }
    }
  }
  return events;
}

}  // namespace aim
