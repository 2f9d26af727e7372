#include "aim/motionplan.hpp"

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <limits>

namespace aim {
namespace {

constexpr double kEps = 1e-9;
constexpr double kStaleAnchorMargin = 0.1;  // m; anchors at/behind the ego are met

// Polynomial longitudinal piece s(t) = sum c_k t^k over a duration.
struct Piece {
  double duration = 0.0;
  std::array<double, 6> c{};

  double s(double t) const {
    double acc = 0.0;
    for (int k = 5; k >= 0; --k) acc = acc * t + c[k];
    return acc;
  }
  double v(double t) const {
    double acc = 0.0;
    for (int k = 5; k >= 1; --k) acc = acc * t + k * c[k];
    return acc;
  }
  double a(double t) const {
    double acc = 0.0;
    for (int k = 5; k >= 2; --k) acc = acc * t + k * (k - 1) * c[k];
    return acc;
  }
};

// Quintic with full boundary conditions on both ends.
Piece quintic(double s0, double v0, double a0, double s1, double v1, double a1, double T) {
  Piece p;
  p.duration = T;
  p.c[0] = s0;
  p.c[1] = v0;
  p.c[2] = 0.5 * a0;
  const double T2 = T * T, T3 = T2 * T, T4 = T3 * T, T5 = T4 * T;
  const double ds = s1 - s0 - v0 * T - 0.5 * a0 * T2;
  const double dv = v1 - v0 - a0 * T;
  const double da = a1 - a0;
  p.c[3] = (20.0 * ds - 8.0 * dv * T + da * T2) / (2.0 * T3);
  p.c[4] = (-30.0 * ds + 14.0 * dv * T - 2.0 * da * T2) / (2.0 * T4);
  p.c[5] = (12.0 * ds - 6.0 * dv * T + da * T2) / (2.0 * T5);
  return p;
}

// Quartic with free terminal position.
Piece quartic(double s0, double v0, double a0, double v1, double a1, double T) {
  Piece p;
  p.duration = T;
  p.c[0] = s0;
  p.c[1] = v0;
  p.c[2] = 0.5 * a0;
  const double T2 = T * T, T3 = T2 * T;
  const double dv = v1 - v0 - a0 * T;
  const double da = a1 - a0;
  p.c[3] = (3.0 * dv - da * T) / (3.0 * T2);
  p.c[4] = (-2.0 * dv + da * T) / (4.0 * T3);
  p.c[5] = 0.0;
  return p;
}

Piece hold(double s0, double v0, double T) {
  Piece p;
  p.duration = T;
  p.c[0] = s0;
  p.c[1] = v0;
  return p;
}

struct Candidate {
  std::vector<Piece> pieces;
  double terminal_time = 0.0;   // total phase-1 duration
  double terminal_speed = 0.0;  // speed at the end of phase 1
  double cost = 0.0;

  double total_duration() const {
    double d = 0.0;
    for (const auto& p : pieces) d += p.duration;
    return d;
  }
  void eval(double t, double* s, double* v, double* a) const {
    for (const auto& p : pieces) {
      if (t <= p.duration + kEps) {
        *s = p.s(t);
        *v = p.v(t);
        *a = p.a(t);
        return;
      }
      t -= p.duration;
    }
    const Piece& last = pieces.back();
    *s = last.s(last.duration);
    *v = last.v(last.duration);
    *a = last.a(last.duration);
  }
};

// Piecewise upper speed bound along the path: segment limits and curve
// speeds, backward-propagated so braking at env_decel always suffices.
struct Envelope {
  double step = 0.5;
  std::vector<double> bound;  // at i * step from the path start
  double length = 0.0;

  double at(double s) const {
    if (bound.empty()) return 0.0;
    const double idx = std::clamp(s, 0.0, length) / step;
    const std::size_t i = std::min(static_cast<std::size_t>(idx), bound.size() - 1);
    const std::size_t j = std::min(i + 1, bound.size() - 1);
    const double frac = idx - static_cast<double>(i);
    return bound[i] * (1.0 - frac) + bound[j] * frac;
  }
};

struct PathModel {
  Polyline poly;
  std::vector<double> seg_limit;
  Envelope env;

  double limit_at(double s) const {
    if (seg_limit.empty()) return 0.0;
    const std::size_t i = poly.segment_index(std::clamp(s, 0.0, poly.length()));
    return seg_limit[std::min(i, seg_limit.size() - 1)];
  }
};

PathModel build_path_model(const MotionPlanningObjective& obj, const MotionPlannerConfig& cfg) {
  PathModel m;
  m.poly = Polyline(obj.path);
  m.seg_limit = obj.max_speed;
  m.env.step = 0.5;
  m.env.length = m.poly.length();
  const std::size_t n = static_cast<std::size_t>(std::ceil(m.env.length / m.env.step)) + 1;
  m.env.bound.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = std::min(static_cast<double>(i) * m.env.step, m.env.length);
    double b = m.limit_at(s);
    const double kappa = m.poly.curvature_at(s);
    if (kappa > 1e-6) b = std::min(b, std::sqrt(cfg.env_lat_accel / kappa));
    m.env.bound[i] = b;
  }
  if (obj.timeout_no_anchor) {
    // The objective guides only part of the way; come to a stop at its end.
    m.env.bound.back() = 0.0;
  }
  for (std::size_t i = n - 1; i-- > 0;) {
    const double reachable = std::sqrt(m.env.bound[i + 1] * m.env.bound[i + 1] +
                                       2.0 * cfg.env_decel * m.env.step);
    m.env.bound[i] = std::min(m.env.bound[i], reachable);
  }
  return m;
}

// Hard-limit check of a phase-1 candidate, sampled on the trajectory grid.
bool candidate_feasible(const Candidate& cand, const PathModel& path, double arc0,
                        const MotionPlannerConfig& cfg) {
  const double T = cand.total_duration();
  const double tol = 1e-6;
  for (double t = 0.0; t <= T + kEps; t += cfg.dt) {
    double s, v, a;
    cand.eval(std::min(t, T), &s, &v, &a);
    if (v < -tol) return false;
    if (std::abs(a) > cfg.hard_accel + tol) return false;
    const double arc = arc0 + s;
    if (arc <= path.poly.length() + kEps) {
      if (v > path.limit_at(arc) + tol) return false;
      const double kappa = path.poly.curvature_at(arc);
      if (v * v * kappa > cfg.hard_lat_accel + tol) return false;
    }
  }
  return true;
}

double candidate_cost(const Candidate& cand, const PathModel& path, double arc0,
                      const CostWeights& w, const MotionPlannerConfig& cfg,
                      const std::optional<AnchorPoint>& anchor, double anchor_dt) {
  const double T = cand.total_duration();
  double sum_a2 = 0.0, sum_j2 = 0.0, sum_dev2 = 0.0;
  double prev_a = 0.0;
  int count = 0;
  for (double t = 0.0; t <= T + kEps; t += cfg.dt) {
    double s, v, a;
    cand.eval(std::min(t, T), &s, &v, &a);
    sum_a2 += a * a;
    if (count > 0) {
      const double j = (a - prev_a) / cfg.dt;
      sum_j2 += j * j;
    }
    prev_a = a;
    const double limit = path.limit_at(arc0 + s);
    const double dev = std::max(limit - v, 0.0);
    sum_dev2 += dev * dev;
    ++count;
  }
  const double n = std::max(count, 1);
  double cost = w.accel * sum_a2 / n + w.jerk * sum_j2 / n + w.limit_dev * sum_dev2 / n;
  if (anchor) {
    const double te = cand.terminal_time - anchor_dt;
    const double ve = cand.terminal_speed - anchor->speed;
    cost += w.anchor_time * te * te + w.anchor_speed * ve * ve;
  }
  return cost;
}

// Extends a phase-1 profile to the horizon by tracking the speed envelope
// with the same proportional gain the rollout policy uses, so executed and
// predicted speeds stay consistent beyond the anchor.
void extend_with_envelope(std::vector<double>& s, std::vector<double>& v,
                          std::vector<double>& a, const PathModel& path, double arc0,
                          const MotionPlannerConfig& cfg, double horizon) {
  while (!s.empty() && s.size() * cfg.dt <= horizon + kEps) {
    const double cur_s = s.back();
    const double cur_v = v.back();
    if (arc0 + cur_s >= path.poly.length() - 1e-3) break;
    const double next_env = path.env.at(arc0 + cur_s + cur_v * cfg.dt);
    double acc = std::clamp(cfg.env_gain * (next_env - cur_v), -(cfg.hard_accel - 0.1),
                            cfg.env_accel);
    double next_v = std::max(std::min(cur_v + acc * cfg.dt, next_env), 0.0);
    acc = (next_v - cur_v) / cfg.dt;
    s.push_back(cur_s + cur_v * cfg.dt + 0.5 * acc * cfg.dt * cfg.dt);
    v.push_back(next_v);
    a.push_back(acc);
  }
}

Trajectory finalize(const std::vector<double>& s, const std::vector<double>& v,
                    const std::vector<double>& a, const PathModel& path, double arc0,
                    const MotionPlannerConfig& cfg) {
  Trajectory traj;
  traj.samples.reserve(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) {
    TrajectoryPoint pt;
    pt.t = static_cast<double>(k) * cfg.dt;
    pt.arc = arc0 + s[k];
    const double arc = std::min(pt.arc, path.poly.length());
    const Vec2 pos = path.poly.point_at(arc);
    pt.pose = {pos.x, pos.y, path.poly.heading_at(arc)};
    pt.speed = std::max(v[k], 0.0);
    pt.accel = std::clamp(a[k], -cfg.hard_accel, cfg.hard_accel);
    pt.curvature = path.poly.curvature_at(arc);
    traj.samples.push_back(pt);
    if (pt.arc >= path.poly.length() - 1e-3) break;
  }
  traj.horizon = traj.samples.empty() ? 0.0 : traj.samples.back().t;
  return traj;
}

// Samples a candidate's phase 1 onto the grid arrays.
void sample_candidate(const Candidate& cand, const MotionPlannerConfig& cfg,
                      std::vector<double>& s, std::vector<double>& v,
                      std::vector<double>& a) {
  const double T = cand.total_duration();
  for (double t = 0.0; t <= T + kEps; t += cfg.dt) {
    double ps, pv, pa;
    cand.eval(std::min(t, T), &ps, &pv, &pa);
    s.push_back(ps);
    v.push_back(std::max(pv, 0.0));
    a.push_back(pa);
  }
}

Trajectory max_braking_fallback(const EgoState& ego, const PathModel& path,
                                const MotionPlannerConfig& cfg, double horizon) {
  std::vector<double> s{0.0}, v{ego.speed}, a{-cfg.hard_accel};
  double cur_v = ego.speed;
  double cur_s = 0.0;
  for (double t = cfg.dt; t <= horizon + kEps; t += cfg.dt) {
    const double next_v = std::max(cur_v - cfg.hard_accel * cfg.dt, 0.0);
    const double acc = (next_v - cur_v) / cfg.dt;
    cur_s += cur_v * cfg.dt + 0.5 * acc * cfg.dt * cfg.dt;
    cur_v = next_v;
    s.push_back(cur_s);
    v.push_back(cur_v);
    a.push_back(acc);
  }
  Trajectory traj = finalize(s, v, a, path, ego.arc, cfg);
  traj.infeasible = true;
  return traj;
}

Trajectory follow_profile(const EgoState& ego,
                          const LeadInfo& lead, const PathModel& path,
                          const MotionPlannerConfig& cfg, double horizon) {
  std::vector<double> s{0.0}, v{ego.speed}, a{};
  bool infeasible = false;
  follow_accel(lead, ego.speed, cfg, &infeasible);

  double gap = lead.gap;
  double cur_v = ego.speed;
  double cur_s = 0.0;
  for (double t = 0.0; t + cfg.dt <= horizon + kEps; t += cfg.dt) {
    bool step_infeasible = false;
    double cmd = follow_accel({gap, lead.speed}, cur_v, cfg, &step_infeasible);
    // Closing in on the lead never outpaces plain envelope tracking.
    const double env_next = path.env.at(ego.arc + cur_s + cur_v * cfg.dt);
    cmd = std::min(cmd, std::min(cfg.env_gain * (env_next - cur_v), cfg.env_accel));
    double next_v = cur_v + cmd * cfg.dt;
    next_v = std::min(next_v, env_next);
    next_v = std::max(next_v, 0.0);
    const double acc = std::clamp((next_v - cur_v) / cfg.dt, -cfg.hard_accel, cfg.hard_accel);
    next_v = cur_v + acc * cfg.dt;
    a.push_back(acc);
    cur_s += cur_v * cfg.dt + 0.5 * acc * cfg.dt * cfg.dt;
    gap += (lead.speed - cur_v) * cfg.dt;
    cur_v = next_v;
    s.push_back(cur_s);
    v.push_back(cur_v);
    if (ego.arc + cur_s >= path.poly.length() - 1e-3) break;
  }
  a.push_back(a.empty() ? 0.0 : a.back());
  Trajectory traj = finalize(s, v, a, path, ego.arc, cfg);
  traj.follow_mode = true;
  traj.infeasible = infeasible;
  return traj;
}

}  // namespace

double follow_accel(const LeadInfo& lead, double v_ego, const MotionPlannerConfig& cfg,
                    bool* infeasible) {
  assert(lead.gap >= 0.0 && "negative gap is a collision, handled elsewhere");
  const double a = time_gap_accel(lead.gap, v_ego, lead.speed, cfg.follow);
  if (infeasible && v_ego > lead.speed) {
    const double closing = std::max(lead.gap - cfg.follow.standstill, 0.1);
    const double required = (v_ego * v_ego - lead.speed * lead.speed) / (2.0 * closing);
    if (required > cfg.hard_accel) *infeasible = true;
  }
  return std::clamp(a, -cfg.hard_accel, cfg.hard_accel);
}

Trajectory plan_trajectory(const MotionPlanningObjective& obj, const EgoState& ego,
                           const std::optional<LeadInfo>& lead, const CostWeights& weights,
                           const MotionPlannerConfig& cfg, double horizon) {
  PathModel path = build_path_model(obj, cfg);
  horizon = std::clamp(horizon, cfg.dt, cfg.max_horizon);

  if (lead && lead->gap <= cfg.follow_range) {
    const double desired = cfg.follow.standstill + cfg.follow.headway * ego.speed;
    if (lead->gap <= desired + cfg.follow_engage_margin) {
      return follow_profile(ego, *lead, path, cfg, horizon);
    }
  }

  // Anchor handling: an anchor at or behind the ego position is met.
  std::optional<AnchorPoint> anchor;
  double anchor_arc = 0.0;
  if (!obj.anchors.empty()) {
    const auto& ap = obj.anchors.front();
    const double arc = path.poly.project(ap.position).s;
    if (arc > ego.arc + kStaleAnchorMargin && ap.dt > cfg.dt) {
      anchor = ap;
      anchor_arc = arc;
    }
  }

  std::vector<Candidate> candidates;
  const double v0 = ego.speed;
  const double a0 = ego.accel;

  if (anchor) {
    const double target_s = anchor_arc - ego.arc;
    const double dt_ap = anchor->dt;
    const std::array<double, 5> time_grid{-0.4, -0.2, 0.0, 0.2, 0.4};
    const std::array<double, 5> speed_grid{-1.0, -0.5, 0.0, 0.5, 1.0};

    for (double dT : time_grid) {
      // Terminal times snap to the sample grid so the anchor state lands
      // exactly on a trajectory sample.
      const double T = std::round((dt_ap + dT) / cfg.dt) * cfg.dt;
      if (T < cfg.dt) continue;
      for (double dv : speed_grid) {
        const double v1 = anchor->speed + dv;
        if (v1 < 0.0) continue;
        Candidate cand;
        cand.pieces.push_back(quintic(0.0, v0, a0, target_s, v1, 0.0, T));
        cand.terminal_time = T;
        cand.terminal_speed = v1;
        candidates.push_back(std::move(cand));
      }
    }

    // Piecewise brake(-hold)-go profiles cover long-delay anchors that a
    // single quintic cannot realize without reversing.
    const double T = std::round(dt_ap / cfg.dt) * cfg.dt;
    if (T >= 1.5) {
      std::vector<double> brake_times{1.0, 2.0, 0.25 * T, 0.5 * T};
      std::sort(brake_times.begin(), brake_times.end());
      brake_times.erase(std::unique(brake_times.begin(), brake_times.end(),
                                    [](double a, double b) { return std::abs(a - b) < 0.2; }),
                        brake_times.end());
      for (double ta : brake_times) {
        if (ta < 2.0 * cfg.dt || ta > T - 0.5) continue;
        for (double vm = 0.0; vm <= v0 + 0.5; vm += 1.0) {
          const Piece brake = quartic(0.0, v0, a0, vm, 0.0, ta);
          const double s_brake = brake.s(ta);
          const double rest_s = target_s - s_brake;
          const double rest_t = T - ta;
          if (rest_s <= 0.0 || rest_t < cfg.dt) continue;
          for (double dv : {-0.5, 0.0, 0.5}) {
            const double v1 = anchor->speed + dv;
            if (v1 < 0.0) continue;
            // Hold at vm, then a quintic sized for a plausible mean speed.
            double tb = std::clamp(2.0 * rest_s / std::max(vm + v1, 0.5), 1.0, rest_t);
            const double th = rest_t - tb;
            Candidate cand;
            cand.pieces.push_back(brake);
            double s_at = s_brake;
            if (th > kEps) {
              cand.pieces.push_back(hold(s_at, vm, th));
              s_at += vm * th;
            }
            cand.pieces.push_back(quintic(s_at, vm, 0.0, target_s, v1, 0.0, rest_t - th));
            cand.terminal_time = T;
            cand.terminal_speed = v1;
            candidates.push_back(std::move(cand));
          }
        }
      }
    }
  } else {
    // No (remaining) anchor: quartic cruise candidates toward a grid of
    // terminal speeds; the limit-deviation cost favors progress.
    double v_top = 0.0;
    for (double b : path.env.bound) v_top = std::max(v_top, b);
    for (int Ti = 2; Ti <= 8; ++Ti) {
      for (double v1 = 0.0; v1 <= v_top + 0.25; v1 += 1.0) {
        Candidate cand;
        cand.pieces.push_back(quartic(0.0, v0, a0, v1, 0.0, static_cast<double>(Ti)));
        cand.terminal_time = Ti;
        cand.terminal_speed = v1;
        candidates.push_back(std::move(cand));
      }
    }
  }

  const Candidate* best = nullptr;
  double best_cost = std::numeric_limits<double>::infinity();
  for (auto& cand : candidates) {
    if (!candidate_feasible(cand, path, ego.arc, cfg)) continue;
    cand.cost = candidate_cost(cand, path, ego.arc, weights, cfg, anchor,
                               anchor ? anchor->dt : 0.0);
    if (cand.cost < best_cost) {
      best_cost = cand.cost;
      best = &cand;
    }
  }
  if (!best) {
    return max_braking_fallback(ego, path, cfg, horizon);
  }

  std::vector<double> s, v, a;
  sample_candidate(*best, cfg, s, v, a);
  extend_with_envelope(s, v, a, path, ego.arc, cfg, horizon);
  return finalize(s, v, a, path, ego.arc, cfg);
}

}  // namespace aim
