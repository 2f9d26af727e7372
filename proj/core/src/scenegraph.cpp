#include "aim/scenegraph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "aim/wire.hpp"

namespace aim {
namespace {

constexpr double kOffMapLateral = 3.0;
constexpr double kPassedHysteresis = 0.5;  // m past the conflict point
constexpr double kFollowLateral = 1.5;

struct VehicleCtx {
  const VehicleRecord* rec = nullptr;
  std::vector<RoutePath> paths;      // one per hypothesis
  std::vector<double> s_on_path;     // pose arc per hypothesis
  std::size_t primary = 0;
  std::string current_lane;
  ApproachInfo approach;
};

double clip1(double v) { return std::clamp(v, -1.0, 1.0); }

}  // namespace

int ObservationGraph::vertex_index(int vehicle_id) const {
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    if (vertices[i].vehicle_id == vehicle_id) return static_cast<int>(i);
  }
  return -1;
}

std::array<double, kVertexInputDim> vertex_input(const VertexFeatures& v) {
  return {clip1(v.s_to_entry / kPositionScale), clip1(v.speed / kSpeedScale),
          clip1(v.lane_speed_limit / kSpeedScale), v.controllable ? 1.0 : 0.0};
}

std::array<double, kEdgeInputDim> edge_input(const EdgeFeatures& e, bool reversed) {
  const double d_src = reversed ? e.target_to_conflict : e.source_to_conflict;
  const double d_tgt = reversed ? e.source_to_conflict : e.target_to_conflict;
  const double prio = reversed ? -e.priority : e.priority;
  return {e.kind == RelationKind::kCrossing ? 1.0 : 0.0,
          e.kind == RelationKind::kMerging ? 1.0 : 0.0,
          e.kind == RelationKind::kFollowing ? 1.0 : 0.0,
          clip1(e.distance / kPositionScale),
          clip1(d_src / kPositionScale),
          clip1(d_tgt / kPositionScale),
          prio};
}

ApproachInfo approach_info(const LaneMap& map, const RouteSpec& route) {
  ApproachInfo info;
  const RoutePath path = map.route_path(route);
  const double entry = std::max(path.entry_arc, 0.0);
  info.entry_heading = path.poly.heading_at(std::min(entry, path.poly.length()));
  const double probe = std::min(entry + 25.0, path.poly.length());
  const double exit_heading = path.poly.heading_at(probe);
  const double turn = normalize_angle(exit_heading - info.entry_heading);
  info.turn = turn > kPi / 4 ? 1 : (turn < -kPi / 4 ? -1 : 0);

  const std::string& front = route.lanes.front();
  if (map.is_priority_access(front)) {
    info.priority_road = true;
  } else {
    // A vehicle already inside the intersection keeps the priority of the
    // access it came from.
    for (const auto& lane : map.lanes()) {
      if (map.connected(lane.id, front) && map.is_priority_access(lane.id)) {
        info.priority_road = true;
        break;
      }
    }
  }
  return info;
}

int priority_rank(const ApproachInfo& a, const ApproachInfo& b) {
  if (a.priority_road != b.priority_road) return a.priority_road ? 1 : -1;
  const double rel = normalize_angle(b.entry_heading - a.entry_heading);
  if (std::abs(normalize_angle(rel - kPi)) < kPi / 4) {
    // Oncoming traffic: a left turn yields to straight or right.
    if (a.turn == 1 && b.turn != 1) return -1;
    if (b.turn == 1 && a.turn != 1) return 1;
    return 0;
  }
  if (rel > kPi / 4 && rel < 3 * kPi / 4) return -1;   // b approaches from a's right
  if (rel < -kPi / 4 && rel > -3 * kPi / 4) return 1;  // b approaches from a's left
  return 0;
}

ObservationGraph build_observation(
    const EnvironmentModel& em, const LaneMap& map,
    const std::map<int, std::vector<RouteSpec>>& assumed_routes) {
  std::vector<VehicleCtx> ctx;
  ctx.reserve(em.vehicles.size());

  std::vector<const VehicleRecord*> ordered;
  for (const auto& v : em.vehicles) ordered.push_back(&v);
  std::sort(ordered.begin(), ordered.end(),
            [](const VehicleRecord* a, const VehicleRecord* b) { return a->id < b->id; });

  ObservationGraph graph;
  for (const VehicleRecord* rec : ordered) {
    const auto it = assumed_routes.find(rec->id);
    if (it == assumed_routes.end() || it->second.empty()) {
      throw std::invalid_argument("no assumed route for vehicle " +
                                  std::to_string(rec->id));
    }
    VehicleCtx c;
    c.rec = rec;
    double best_lateral = std::numeric_limits<double>::infinity();
    for (std::size_t ri = 0; ri < it->second.size(); ++ri) {
      RoutePath path = map.route_path(it->second[ri]);
      const auto proj = path.poly.project(rec->pose.position());
      c.s_on_path.push_back(proj.s);
      if (std::abs(proj.lateral) < best_lateral) {
        best_lateral = std::abs(proj.lateral);
        c.primary = ri;
      }
      c.paths.push_back(std::move(path));
    }
    if (best_lateral > kOffMapLateral) {
      throw VehicleOffMapError(rec->id, best_lateral);
    }
    const RoutePath& prim = c.paths[c.primary];
    const double s = c.s_on_path[c.primary];
    c.current_lane = prim.lane_at(s);
    c.approach = approach_info(map, it->second[c.primary]);

    VertexFeatures vf;
    vf.vehicle_id = rec->id;
    vf.s_to_entry = s - (prim.has_entry() ? prim.entry_arc : 0.0);
    vf.speed = rec->speed;
    vf.lane_speed_limit = prim.limit_at(s);
    vf.controllable = rec->controllable;
    graph.vertices.push_back(vf);
    ctx.push_back(std::move(c));
  }

  // Pairwise relations.
  for (std::size_t i = 0; i < ctx.size(); ++i) {
    for (std::size_t j = i + 1; j < ctx.size(); ++j) {
      const VehicleCtx& a = ctx[i];
      const VehicleCtx& b = ctx[j];

      // Same-corridor following: b's current lane lies on a's primary path
      // (or vice versa) and no third vehicle sits between them.
      const RoutePath& pa = a.paths[a.primary];
      const RoutePath& pb = b.paths[b.primary];
      const double sa = a.s_on_path[a.primary];
      const double sb = b.s_on_path[b.primary];
      bool following = false;
      double gap = 0.0;             // positive: b ahead of a
      const RoutePath* ref = nullptr;  // path both positions refer to
      double pos_a = 0.0, pos_b = 0.0;
      if (pa.lane_start.count(b.current_lane)) {
        const auto proj = pa.poly.project(b.rec->pose.position());
        if (std::abs(proj.lateral) <= kFollowLateral) {
          following = true;
          ref = &pa;
          pos_a = sa;
          pos_b = proj.s;
          gap = pos_b - pos_a;
        }
      }
      if (!following && pb.lane_start.count(a.current_lane)) {
        const auto proj = pb.poly.project(a.rec->pose.position());
        if (std::abs(proj.lateral) <= kFollowLateral) {
          following = true;
          ref = &pb;
          pos_a = proj.s;
          pos_b = sb;
          gap = pos_b - pos_a;
        }
      }
      if (following) {
        // Direct neighbor check: skip if another vehicle projects between.
        const double lo = std::min(pos_a, pos_b);
        const double hi = std::max(pos_a, pos_b);
        bool direct = true;
        for (std::size_t k = 0; k < ctx.size() && direct; ++k) {
          if (k == i || k == j) continue;
          const auto proj = ref->poly.project(ctx[k].rec->pose.position());
          if (std::abs(proj.lateral) <= kFollowLateral && proj.s > lo + 0.1 &&
              proj.s < hi - 0.1) {
            direct = false;
          }
        }
        if (direct) {
          GraphEdge e;
          e.source = a.rec->id;
          e.target = b.rec->id;
          e.features.kind = RelationKind::kFollowing;
          e.features.distance = std::abs(gap);
          // Convention: the trailing endpoint carries the gap, the leader 0.
          e.features.source_to_conflict = gap > 0.0 ? std::abs(gap) : 0.0;
          e.features.target_to_conflict = gap > 0.0 ? 0.0 : std::abs(gap);
          e.features.priority = gap > 0.0 ? -1 : 1;  // leader has right of way
          graph.edges.push_back(e);
          continue;
        }
      }

      // Conflict relation over the hypothesis union: nearest unpassed shared
      // conflict point over all route pairs.
      bool found = false;
      double best_sum = std::numeric_limits<double>::infinity();
      EdgeFeatures best;
      for (std::size_t ra = 0; ra < a.paths.size(); ++ra) {
        for (std::size_t rb = 0; rb < b.paths.size(); ++rb) {
          for (const auto& cp : map.conflicts()) {
            const auto la = a.paths[ra].lane_start.find(cp.lane_a);
            const auto lb = b.paths[rb].lane_start.find(cp.lane_b);
            const auto la2 = a.paths[ra].lane_start.find(cp.lane_b);
            const auto lb2 = b.paths[rb].lane_start.find(cp.lane_a);
            double s_on_a = 0.0, s_on_b = 0.0;
            if (la != a.paths[ra].lane_start.end() && lb != b.paths[rb].lane_start.end()) {
              s_on_a = la->second + cp.s_a;
              s_on_b = lb->second + cp.s_b;
            } else if (la2 != a.paths[ra].lane_start.end() &&
                       lb2 != b.paths[rb].lane_start.end()) {
              s_on_a = la2->second + cp.s_b;
              s_on_b = lb2->second + cp.s_a;
            } else {
              continue;
            }
            const double da = s_on_a - a.s_on_path[ra];
            const double db = s_on_b - b.s_on_path[rb];
            if (da < -kPassedHysteresis || db < -kPassedHysteresis) continue;  // passed
            if (da + db < best_sum) {
              best_sum = da + db;
              best.kind = cp.kind == ConflictKind::kCrossing ? RelationKind::kCrossing
                                                             : RelationKind::kMerging;
              best.distance = da + db;
              best.source_to_conflict = da;
              best.target_to_conflict = db;
              found = true;
            }
          }
        }
      }
      if (found) {
        GraphEdge e;
        e.source = a.rec->id;
        e.target = b.rec->id;
        best.priority = priority_rank(a.approach, b.approach);
        e.features = best;
        graph.edges.push_back(e);
      }
    }
  }

  std::sort(graph.edges.begin(), graph.edges.end(), [](const GraphEdge& x, const GraphEdge& y) {
    return std::tie(x.source, x.target) < std::tie(y.source, y.target);
  });
  return graph;
}

std::string dump_graph(const ObservationGraph& g) {
  std::ostringstream out;
  out << "graph vertices " << g.vertices.size() << " edges " << g.edges.size() << "\n";
  for (const auto& v : g.vertices) {
    out << "vertex " << v.vehicle_id << " s_to_entry " << format_double(v.s_to_entry)
        << " speed " << format_double(v.speed) << " limit "
        << format_double(v.lane_speed_limit) << " controllable " << (v.controllable ? 1 : 0)
        << "\n";
  }
  for (const auto& e : g.edges) {
    const char* kind = e.features.kind == RelationKind::kCrossing    ? "crossing"
                       : e.features.kind == RelationKind::kMerging   ? "merging"
                                                                     : "following";
    out << "edge " << e.source << " " << e.target << " " << kind << " distance "
        << format_double(e.features.distance) << " d_src "
        << format_double(e.features.source_to_conflict) << " d_tgt "
        << format_double(e.features.target_to_conflict) << " priority "
        << e.features.priority << "\n";
  }
  return out.str();
}

}  // namespace aim
