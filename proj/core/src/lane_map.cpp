#include "aim/lane_map.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "aim/wire.hpp"
#include "text_io.hpp"

namespace aim {
namespace {

// Crossing candidates closer than this (arc length on both lanes) to a
// shared junction point are artefacts of touching endpoints, not conflicts.
constexpr double kJunctionExclusion = 1.5;
// Minimum arc spacing between two distinct crossing points of a lane pair.
constexpr double kCrossingDedup = 1.0;

std::vector<Vec2> convex_hull(std::vector<Vec2> pts) {
  std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  std::vector<Vec2> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {  // lower hull
    while (k >= 2 && cross(hull[k - 1] - hull[k - 2], p - hull[k - 2]) <= 0) --k;
    hull[k++] = p;
  }
  const std::size_t lower = k + 1;
  for (auto it = pts.rbegin() + 1; it != pts.rend(); ++it) {  // upper hull
    while (k >= lower && cross(hull[k - 1] - hull[k - 2], *it - hull[k - 2]) <= 0) --k;
    hull[k++] = *it;
  }
  hull.resize(k - 1);  // counter-clockwise, last point == first dropped
  return hull;
}

std::vector<Vec2> offset_convex(const std::vector<Vec2>& hull, double margin) {
  const std::size_t n = hull.size();
  if (n < 3) {
    // Degenerate hull: fall back to an inflated bounding box.
    double xmin = 1e18, xmax = -1e18, ymin = 1e18, ymax = -1e18;
    for (const auto& p : hull) {
      xmin = std::min(xmin, p.x);
      xmax = std::max(xmax, p.x);
      ymin = std::min(ymin, p.y);
      ymax = std::max(ymax, p.y);
    }
    if (hull.empty()) return {};
    return {{xmin - margin, ymin - margin},
            {xmax + margin, ymin - margin},
            {xmax + margin, ymax + margin},
            {xmin - margin, ymax + margin}};
  }
  // Shift every edge outward by `margin` and intersect consecutive edges.
  std::vector<Vec2> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 pp = hull[(i + n - 1) % n];
    const Vec2 pc = hull[i];
    const Vec2 pn = hull[(i + 1) % n];
    auto outward = [](const Vec2& a, const Vec2& b) {
      const Vec2 d = b - a;
      const double l = norm(d);
      return Vec2{d.y / l, -d.x / l};  // right normal of CCW edge
    };
    const Vec2 n0 = outward(pp, pc);
    const Vec2 n1 = outward(pc, pn);
    const Vec2 a0 = pp + n0 * margin, a1 = pc + n0 * margin;
    const Vec2 b0 = pc + n1 * margin, b1 = pn + n1 * margin;
    const Vec2 r = a1 - a0, s = b1 - b0;
    const double den = cross(r, s);
    if (std::abs(den) < 1e-9) {
      out[i] = pc + n0 * margin;  // nearly collinear edges
    } else {
      const double t = cross(b0 - a0, s) / den;
      out[i] = a0 + r * t;
    }
  }
  return out;
}

}  // namespace

double RoutePath::limit_at(double s) const {
  if (seg_limit.empty()) return 0.0;
  const std::size_t i = poly.segment_index(std::clamp(s, 0.0, poly.length()));
  return seg_limit[std::min(i, seg_limit.size() - 1)];
}

const std::string& RoutePath::lane_at(double s) const {
  static const std::string kEmpty;
  if (seg_lane.empty()) return kEmpty;
  const std::size_t i = poly.segment_index(std::clamp(s, 0.0, poly.length()));
  return seg_lane[std::min(i, seg_lane.size() - 1)];
}

LaneMap::LaneMap(std::string name, std::vector<Lane> lanes)
    : name_(std::move(name)), lanes_(std::move(lanes)) {
  for (std::size_t i = 0; i < lanes_.size(); ++i) {
    index_[lanes_[i].id] = i;
  }
  for (const auto& lane : lanes_) {
    for (const auto& succ : lane.successors) {
      has_predecessor_[succ] = true;
    }
  }
  derive_conflicts();
  derive_entries();
  derive_polygon();
}

const Lane* LaneMap::find(const std::string& id) const {
  const auto it = index_.find(id);
  return it == index_.end() ? nullptr : &lanes_[it->second];
}

bool LaneMap::connected(const std::string& from, const std::string& to) const {
  const Lane* lane = find(from);
  if (!lane) return false;
  return std::find(lane->successors.begin(), lane->successors.end(), to) !=
         lane->successors.end();
}

bool LaneMap::is_access(const std::string& id) const {
  const Lane* lane = find(id);
  if (!lane) return false;
  return !has_predecessor_.count(id) && !lane->successors.empty();
}

bool LaneMap::is_exit(const std::string& id) const {
  const Lane* lane = find(id);
  return lane && lane->successors.empty();
}

bool LaneMap::is_priority_access(const std::string& id) const {
  return std::find(priority_accesses_.begin(), priority_accesses_.end(), id) !=
         priority_accesses_.end();
}

void LaneMap::set_priority_accesses(std::vector<std::string> ids) {
  priority_accesses_ = std::move(ids);
}

void LaneMap::override_conflicts(std::vector<ConflictPoint> conflicts) {
  conflicts_ = std::move(conflicts);
  for (auto& cp : conflicts_) {
    const Lane* a = find(cp.lane_a);
    if (a) cp.position = a->centerline.point_at(cp.s_a);
  }
  derive_polygon();
}

void LaneMap::override_entry(const std::string& lane, double arc) {
  entries_[lane] = arc;
}

LaneProjection project_to_lane(const Pose& pose, const Lane& lane) {
  const auto proj = lane.centerline.project(pose.position());
  return {proj.s, proj.lateral};
}

RoutePath LaneMap::route_path(const RouteSpec& route) const {
  if (route.lanes.empty()) {
    throw std::invalid_argument("route is empty");
  }
  RoutePath rp;
  std::vector<Vec2> pts;
  std::vector<double> seg_limit;
  std::vector<std::string> seg_lane;
  double arc = 0.0;
  for (std::size_t li = 0; li < route.lanes.size(); ++li) {
    const Lane* lane = find(route.lanes[li]);
    if (!lane) {
      throw std::invalid_argument("route references unknown lane '" + route.lanes[li] + "'");
    }
    if (li > 0 && !connected(route.lanes[li - 1], route.lanes[li])) {
      throw std::invalid_argument("route lanes '" + route.lanes[li - 1] + "' -> '" +
                                  route.lanes[li] + "' are not connected");
    }
    rp.lane_start[lane->id] = arc;
    const auto& cl = lane->centerline.points();
    std::size_t first = 0;
    if (!pts.empty() && distance(pts.back(), cl.front()) < 1e-6) {
      first = 1;  // drop the duplicated junction point
    }
    for (std::size_t i = first; i < cl.size(); ++i) {
      if (!pts.empty()) {
        seg_limit.push_back(lane->speed_limit);
        seg_lane.push_back(lane->id);
        arc += distance(pts.back(), cl[i]);
      }
      pts.push_back(cl[i]);
    }
  }
  rp.poly = Polyline(std::move(pts));
  rp.seg_limit = std::move(seg_limit);
  rp.seg_lane = std::move(seg_lane);
  // Intersection entry: start of the first lane that has a predecessor.
  rp.entry_arc = -1.0;
  for (const auto& id : route.lanes) {
    if (has_predecessor_.count(id) && !is_access(id)) {
      rp.entry_arc = rp.lane_start.at(id);
      break;
    }
  }
  if (rp.entry_arc < 0.0 && !route.lanes.empty() && !is_access(route.lanes.front())) {
    rp.entry_arc = 0.0;  // route starts inside the intersection
  }
  // Honor per-access entry overrides when the route begins on an access lane.
  if (!route.lanes.empty()) {
    const auto it = entries_.find(route.lanes.front());
    if (it != entries_.end()) rp.entry_arc = it->second;
  }
  return rp;
}

std::vector<RouteSpec> LaneMap::routes_from(const std::string& start_lane) const {
  std::vector<RouteSpec> out;
  if (!find(start_lane)) return out;
  std::vector<std::string> chain{start_lane};
  std::set<std::string> on_chain{start_lane};

  // Depth-first enumeration in declared successor order.
  struct Frame {
    std::string lane;
    std::size_t next = 0;
  };
  std::vector<Frame> stack{{start_lane, 0}};
  while (!stack.empty()) {
    Frame& top = stack.back();
    const Lane* lane = find(top.lane);
    if (!lane || lane->successors.empty()) {
      out.push_back(RouteSpec{chain});
      stack.pop_back();
      on_chain.erase(chain.back());
      chain.pop_back();
      continue;
    }
    if (top.next >= lane->successors.size()) {
      stack.pop_back();
      on_chain.erase(chain.back());
      chain.pop_back();
      continue;
    }
    const std::string succ = lane->successors[top.next++];
    if (!find(succ) || on_chain.count(succ)) continue;  // dangling or cycle
    chain.push_back(succ);
    on_chain.insert(succ);
    stack.push_back({succ, 0});
  }
  return out;
}

std::vector<RouteConflict> LaneMap::shared_conflicts(const RouteSpec& a,
                                                     const RouteSpec& b) const {
  const RoutePath pa = route_path(a);
  const RoutePath pb = route_path(b);
  std::vector<RouteConflict> out;
  for (std::size_t i = 0; i < conflicts_.size(); ++i) {
    const auto& cp = conflicts_[i];
    const auto a_has_a = pa.lane_start.find(cp.lane_a);
    const auto b_has_b = pb.lane_start.find(cp.lane_b);
    if (a_has_a != pa.lane_start.end() && b_has_b != pb.lane_start.end()) {
      out.push_back({i, a_has_a->second + cp.s_a, b_has_b->second + cp.s_b, cp.kind,
                     cp.position});
    }
    const auto a_has_b = pa.lane_start.find(cp.lane_b);
    const auto b_has_a = pb.lane_start.find(cp.lane_a);
    if (a_has_b != pa.lane_start.end() && b_has_a != pb.lane_start.end()) {
      out.push_back({i, a_has_b->second + cp.s_b, b_has_a->second + cp.s_a, cp.kind,
                     cp.position});
    }
  }
  return out;
}

bool LaneMap::inside_intersection(const Vec2& p) const {
  const auto& poly = polygon_;
  if (poly.size() < 3) return false;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2 a = poly[i];
    const Vec2 b = poly[(i + 1) % poly.size()];
    if (cross(b - a, p - a) < 0.0) return false;
  }
  return true;
}

void LaneMap::derive_conflicts() {
  conflicts_.clear();
  // Predecessor sets for the sibling-junction exclusion.
  std::map<std::string, std::set<std::string>> preds;
  for (const auto& lane : lanes_) {
    for (const auto& succ : lane.successors) preds[succ].insert(lane.id);
  }
  auto siblings = [&](const Lane& a, const Lane& b) {
    const auto pa = preds.find(a.id);
    const auto pb = preds.find(b.id);
    if (pa == preds.end() || pb == preds.end()) return false;
    for (const auto& p : pa->second) {
      if (pb->second.count(p)) return true;
    }
    return false;
  };

  for (std::size_t i = 0; i < lanes_.size(); ++i) {
    for (std::size_t j = i + 1; j < lanes_.size(); ++j) {
      const Lane& a = lanes_[i];
      const Lane& b = lanes_[j];
      if (connected(a.id, b.id) || connected(b.id, a.id)) continue;

      bool merging = false;
      for (const auto& succ : a.successors) {
        if (connected(b.id, succ)) {
          merging = true;
          break;
        }
      }
      if (merging) {
        ConflictPoint cp;
        cp.lane_a = a.id;
        cp.lane_b = b.id;
        cp.s_a = a.centerline.length();
        cp.s_b = b.centerline.length();
        cp.kind = ConflictKind::kMerging;
        cp.position = a.centerline.points().back();
        conflicts_.push_back(cp);
      }

      // Geometric crossings.
      const auto& pa = a.centerline.points();
      const auto& pb = b.centerline.points();
      const auto& sa = a.centerline.cumulative();
      const auto& sb = b.centerline.cumulative();
      std::vector<ConflictPoint> found;
      for (std::size_t ia = 0; ia + 1 < pa.size(); ++ia) {
        for (std::size_t ib = 0; ib + 1 < pb.size(); ++ib) {
          const auto hit = segment_intersection(pa[ia], pa[ia + 1], pb[ib], pb[ib + 1]);
          if (!hit) continue;
          ConflictPoint cp;
          cp.lane_a = a.id;
          cp.lane_b = b.id;
          cp.s_a = sa[ia] + hit->first * (sa[ia + 1] - sa[ia]);
          cp.s_b = sb[ib] + hit->second * (sb[ib + 1] - sb[ib]);
          cp.kind = ConflictKind::kCrossing;
          cp.position = pa[ia] + (pa[ia + 1] - pa[ia]) * hit->first;
          // Touching endpoints at a shared junction are not conflicts.
          if (merging && cp.s_a > a.centerline.length() - kJunctionExclusion &&
              cp.s_b > b.centerline.length() - kJunctionExclusion) {
            continue;
          }
          if (siblings(a, b) && cp.s_a < kJunctionExclusion && cp.s_b < kJunctionExclusion) {
            continue;
          }
          bool duplicate = false;
          for (const auto& prev : found) {
            if (std::abs(prev.s_a - cp.s_a) < kCrossingDedup &&
                std::abs(prev.s_b - cp.s_b) < kCrossingDedup) {
              duplicate = true;
              break;
            }
          }
          if (!duplicate) found.push_back(cp);
        }
      }
      std::move(found.begin(), found.end(), std::back_inserter(conflicts_));
    }
  }
  std::sort(conflicts_.begin(), conflicts_.end(), [](const ConflictPoint& x, const ConflictPoint& y) {
    return std::tie(x.lane_a, x.lane_b, x.s_a, x.s_b) <
           std::tie(y.lane_a, y.lane_b, y.s_a, y.s_b);
  });
}

void LaneMap::derive_entries() {
  entries_.clear();
  for (const auto& lane : lanes_) {
    if (is_access(lane.id)) {
      entries_[lane.id] = lane.centerline.length();
    }
  }
}

void LaneMap::derive_polygon() {
  std::vector<Vec2> pts;
  pts.reserve(conflicts_.size());
  for (const auto& cp : conflicts_) pts.push_back(cp.position);
  polygon_ = offset_convex(convex_hull(std::move(pts)), kIntersectionInflation);
}

std::vector<std::string> LaneMap::validate() const {
  std::vector<std::string> problems;
  std::set<std::string> ids;
  for (const auto& lane : lanes_) {
    if (!ids.insert(lane.id).second) {
      problems.push_back("lane '" + lane.id + "': duplicate id");
    }
    if (lane.centerline.size() < 2 || lane.centerline.length() <= 0.0) {
      problems.push_back("lane '" + lane.id + "': centerline must have positive length");
    }
    if (!(lane.speed_limit > 0.0)) {
      problems.push_back("lane '" + lane.id + "': speed limit must be positive");
    }
    for (const auto& succ : lane.successors) {
      if (!find(succ)) {
        problems.push_back("lane '" + lane.id + "': successor '" + succ + "' not defined");
      }
    }
  }
  for (const auto& cp : conflicts_) {
    const Lane* a = find(cp.lane_a);
    const Lane* b = find(cp.lane_b);
    if (!a || !b) {
      problems.push_back("conflict references unknown lane '" +
                         (a ? cp.lane_b : cp.lane_a) + "'");
      continue;
    }
    if (cp.lane_a == cp.lane_b) {
      problems.push_back("conflict lanes must be distinct ('" + cp.lane_a + "')");
    }
    if (cp.s_a < 0.0 || cp.s_a > a->centerline.length() + 1e-6 || cp.s_b < 0.0 ||
        cp.s_b > b->centerline.length() + 1e-6) {
      problems.push_back("conflict between '" + cp.lane_a + "' and '" + cp.lane_b +
                         "' lies outside the lanes' extent");
    }
  }
  for (const auto& [lane, arc] : entries_) {
    const Lane* l = find(lane);
    if (!l) {
      problems.push_back("entry references unknown lane '" + lane + "'");
    } else if (arc < 0.0 || arc > l->centerline.length() + 1e-6) {
      problems.push_back("entry on '" + lane + "' lies outside the lane");
    }
  }
  for (const auto& p : priority_accesses_) {
    if (!find(p)) {
      problems.push_back("priority access '" + p + "' not defined");
    }
  }
  return problems;
}

LaneMap make_cross_map() {
  // Geometry constants: lane offset from the road axis, intersection box
  // half-size, arm length, and the resulting turn radii.
  const double off = 1.75;
  const double box = 8.0;
  const double arm = 100.0;
  const double r_right = box - off;   // 6.25
  const double r_left = box + off;    // 9.75
  const double limit = 10.0;

  struct Arm {
    std::string id;
    double rot;  // rotation applied to the south-arm template
  };
  const std::vector<Arm> arms{{"s", 0.0}, {"e", kPi / 2}, {"n", kPi}, {"w", 3 * kPi / 2}};
  const std::map<std::string, std::string> straight{{"s", "n"}, {"e", "w"}, {"n", "s"}, {"w", "e"}};
  const std::map<std::string, std::string> left{{"s", "w"}, {"e", "s"}, {"n", "e"}, {"w", "n"}};
  const std::map<std::string, std::string> right{{"s", "e"}, {"e", "n"}, {"n", "w"}, {"w", "s"}};

  auto rot = [](const Vec2& p, double a) {
    return Vec2{p.x * std::cos(a) - p.y * std::sin(a), p.x * std::sin(a) + p.y * std::cos(a)};
  };
  auto rot_all = [&](std::vector<Vec2> pts, double a) {
    for (auto& p : pts) p = rot(p, a);
    return pts;
  };

  // South-arm template, heading north into the intersection.
  const std::vector<Vec2> in_t = densify({{off, -arm}, {off, -box}}, 2.0);
  const std::vector<Vec2> out_t = densify({{-off, -box}, {-off, -arm}}, 2.0);
  const std::vector<Vec2> straight_t = densify({{off, -box}, {off, box}}, 2.0);
  const std::vector<Vec2> left_t = sample_arc({off, -box}, kPi / 2, r_left, kPi / 2, 0.5);
  const std::vector<Vec2> right_t = sample_arc({off, -box}, kPi / 2, r_right, -kPi / 2, 0.5);

  std::vector<Lane> lanes;
  for (const auto& armdef : arms) {
    const std::string& a = armdef.id;
    Lane in;
    in.id = a + "_in";
    in.centerline = Polyline(rot_all(in_t, armdef.rot));
    in.speed_limit = limit;
    in.successors = {a + "_" + straight.at(a), a + "_" + left.at(a), a + "_" + right.at(a)};
    lanes.push_back(std::move(in));

    Lane out;
    out.id = a + "_out";
    out.centerline = Polyline(rot_all(out_t, armdef.rot));
    out.speed_limit = limit;
    lanes.push_back(std::move(out));

    Lane st;
    st.id = a + "_" + straight.at(a);
    st.centerline = Polyline(rot_all(straight_t, armdef.rot));
    st.speed_limit = limit;
    st.successors = {straight.at(a) + "_out"};
    lanes.push_back(std::move(st));

    Lane lt;
    lt.id = a + "_" + left.at(a);
    lt.centerline = Polyline(rot_all(left_t, armdef.rot));
    lt.speed_limit = limit;
    lt.successors = {left.at(a) + "_out"};
    lanes.push_back(std::move(lt));

    Lane rt;
    rt.id = a + "_" + right.at(a);
    rt.centerline = Polyline(rot_all(right_t, armdef.rot));
    rt.speed_limit = limit;
    rt.successors = {right.at(a) + "_out"};
    lanes.push_back(std::move(rt));
  }

  LaneMap map("cross4", std::move(lanes));
  map.set_priority_accesses({"w_in", "e_in"});
  return map;
}

LaneMap load_map(std::istream& in) {
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  detail::LineScanner scan(std::move(data));
  std::string line;
  std::size_t at = 0;

  if (!scan.next(line, at)) throw ParseError("format_version", 0, "empty map document");
  auto toks = detail::split_ws(line);
  if (toks.size() != 2 || toks[0] != "format_version") {
    throw ParseError("format_version", at, "expected 'format_version <n>'");
  }
  if (detail::parse_int(toks[1], "format_version", at) != 1) {
    throw ParseError("format_version", at, "unsupported version " + toks[1]);
  }

  std::string name = "unnamed";
  std::vector<Lane> lanes;
  std::vector<ConflictPoint> conflict_overrides;
  std::vector<std::pair<std::string, double>> entry_overrides;
  std::vector<std::string> priority;

  while (scan.next(line, at)) {
    toks = detail::split_ws(line);
    const std::string& key = toks[0];
    if (key == "name") {
      if (toks.size() != 2) throw ParseError("name", at, "expected 'name <id>'");
      name = toks[1];
    } else if (key == "priority_access") {
      priority.assign(toks.begin() + 1, toks.end());
    } else if (key == "lane") {
      if (toks.size() != 6 || toks[2] != "limit" || toks[4] != "successors") {
        throw ParseError("lane", at, "expected 'lane <id> limit <v> successors <a,b|->'");
      }
      Lane lane;
      lane.id = toks[1];
      lane.speed_limit = detail::parse_double(toks[3], "lane limit", at);
      if (toks[5] != "-") {
        lane.successors = detail::split_on(toks[5], ',');
      }
      std::vector<Vec2> pts;
      while (scan.next(line, at)) {
        auto pt = detail::split_ws(line);
        if (pt[0] == "end") break;
        if (pt.size() != 3 || pt[0] != "pt") {
          throw ParseError("lane point", at, "expected 'pt <x> <y>' or 'end'");
        }
        pts.push_back({detail::parse_double(pt[1], "lane point", at),
                       detail::parse_double(pt[2], "lane point", at)});
      }
      if (pts.size() < 2) {
        throw ParseError("lane", at, "lane '" + lane.id + "' needs at least 2 points");
      }
      lane.centerline = Polyline(std::move(pts));
      lanes.push_back(std::move(lane));
    } else if (key == "conflict") {
      if (toks.size() != 6) {
        throw ParseError("conflict", at, "expected 'conflict <a> <b> <sa> <sb> <kind>'");
      }
      ConflictPoint cp;
      cp.lane_a = toks[1];
      cp.lane_b = toks[2];
      cp.s_a = detail::parse_double(toks[3], "conflict", at);
      cp.s_b = detail::parse_double(toks[4], "conflict", at);
      if (toks[5] == "crossing") {
        cp.kind = ConflictKind::kCrossing;
      } else if (toks[5] == "merging") {
        cp.kind = ConflictKind::kMerging;
      } else {
        throw ParseError("conflict", at, "kind must be 'crossing' or 'merging'");
      }
      conflict_overrides.push_back(cp);
    } else if (key == "entry") {
      if (toks.size() != 3) throw ParseError("entry", at, "expected 'entry <lane> <s>'");
      entry_overrides.emplace_back(toks[1], detail::parse_double(toks[2], "entry", at));
    } else {
      throw ParseError(key, at, "unknown directive");
    }
  }

  LaneMap map(name, std::move(lanes));
  if (!priority.empty()) map.set_priority_accesses(std::move(priority));
  if (!conflict_overrides.empty()) map.override_conflicts(std::move(conflict_overrides));
  for (const auto& [lane, arc] : entry_overrides) map.override_entry(lane, arc);
  return map;
}

LaneMap load_map_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open map file '" + path + "'");
  return load_map(in);
}

void save_map(const LaneMap& map, std::ostream& out) {
  out << "format_version 1\n";
  out << "name " << map.name() << "\n";
  if (!map.priority_accesses().empty()) {
    out << "priority_access";
    for (const auto& p : map.priority_accesses()) out << " " << p;
    out << "\n";
  }
  for (const auto& lane : map.lanes()) {
    out << "lane " << lane.id << " limit " << format_double(lane.speed_limit)
        << " successors ";
    if (lane.successors.empty()) {
      out << "-";
    } else {
      for (std::size_t i = 0; i < lane.successors.size(); ++i) {
        if (i) out << ",";
        out << lane.successors[i];
      }
    }
    out << "\n";
    for (const auto& p : lane.centerline.points()) {
      out << "pt " << format_double(p.x) << " " << format_double(p.y) << "\n";
    }
    out << "end\n";
  }
  for (const auto& cp : map.conflicts()) {
    out << "conflict " << cp.lane_a << " " << cp.lane_b << " " << format_double(cp.s_a)
        << " " << format_double(cp.s_b) << " "
        << (cp.kind == ConflictKind::kCrossing ? "crossing" : "merging") << "\n";
  }
  for (const auto& [lane, arc] : map.entries()) {
    out << "entry " << lane << " " << format_double(arc) << "\n";
  }
}

}  // namespace aim
