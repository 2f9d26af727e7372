#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "aim/envmodel.hpp"
#include "aim/geometry.hpp"

namespace aim {

struct Lane {
  std::string id;
  Polyline centerline;
  double speed_limit = 0.0;  // m/s, > 0
  std::vector<std::string> successors;
};

enum class ConflictKind { kCrossing, kMerging };

/// Location where two lanes' centerlines cross or merge, expressed as an
/// arc-length position along each lane.
struct ConflictPoint {
  std::string lane_a;
  std::string lane_b;
  double s_a = 0.0;
  double s_b = 0.0;
  ConflictKind kind = ConflictKind::kCrossing;
  Vec2 position;
};

/// Result of projecting a pose onto a lane centerline.
struct LaneProjection {
  double arc = 0.0;
  double lateral = 0.0;  // left of travel direction positive
};

/// A route's geometry assembled from consecutive lane centerlines, with
/// per-segment speed limits and the arc position of the intersection entry.
struct RoutePath {
  Polyline poly;
  std::vector<double> seg_limit;        // per polyline segment
  std::vector<std::string> seg_lane;    // lane id per polyline segment
  std::map<std::string, double> lane_start;  // lane id -> arc where it begins
  double entry_arc = -1.0;  // arc of the intersection entry, < 0 if none ahead

  bool has_entry() const { return entry_arc >= 0.0; }
  double limit_at(double s) const;
  const std::string& lane_at(double s) const;
};

/// Conflict point mapped onto two concrete routes.
struct RouteConflict {
  std::size_t conflict_index = 0;
  double s_on_a = 0.0;
  double s_on_b = 0.0;
  ConflictKind kind = ConflictKind::kCrossing;
  Vec2 position;
};

class LaneMap {
 public:
  LaneMap() = default;
  LaneMap(std::string name, std::vector<Lane> lanes);

  const std::string& name() const { return name_; }
  const std::vector<Lane>& lanes() const { return lanes_; }
  const std::vector<ConflictPoint>& conflicts() const { return conflicts_; }
  const std::map<std::string, double>& entries() const { return entries_; }
  const std::vector<std::string>& priority_accesses() const { return priority_accesses_; }

  const Lane* find(const std::string& id) const;
  bool connected(const std::string& from, const std::string& to) const;
  bool is_access(const std::string& id) const;
  bool is_exit(const std::string& id) const;
  bool is_priority_access(const std::string& id) const;

  void set_priority_accesses(std::vector<std::string> ids);
  /// Replaces auto-derived conflict points with an explicit list.
  void override_conflicts(std::vector<ConflictPoint> conflicts);
  /// Overrides the derived entry position of one access lane.
  void override_entry(const std::string& lane, double arc);

  /// Assembles the route geometry; throws std::invalid_argument for routes
  /// that are empty or not connected in the map topology.
  RoutePath route_path(const RouteSpec& route) const;

  /// All routes from `start_lane` to an exit lane, depth-first order.
  std::vector<RouteSpec> routes_from(const std::string& start_lane) const;

  /// Conflict points shared between two routes, with arc positions on each.
  std::vector<RouteConflict> shared_conflicts(const RouteSpec& a, const RouteSpec& b) const;

  /// Convex hull of all conflict points inflated outward; used as the
  /// intersection area for crossing-order bookkeeping.
  const std::vector<Vec2>& intersection_polygon() const { return polygon_; }
  bool inside_intersection(const Vec2& p) const;

  /// Structural validation; returns human-readable problems (empty = ok).
  std::vector<std::string> validate() const;

 private:
  void derive_conflicts();
  void derive_entries();
  void derive_polygon();

  std::string name_;
  std::vector<Lane> lanes_;
  std::vector<ConflictPoint> conflicts_;
  std::map<std::string, double> entries_;  // access lane id -> entry arc
  std::vector<std::string> priority_accesses_;
  std::vector<Vec2> polygon_;
  std::map<std::string, std::size_t> index_;
  std::map<std::string, bool> has_predecessor_;
};

/// Closest-point projection of a pose onto a lane centerline.
LaneProjection project_to_lane(const Pose& pose, const Lane& lane);

/// Default map: four-arm single-lane-per-approach intersection with an
/// east-west priority road. Approaches are straight, 10 m/s limit.
LaneMap make_cross_map();

/// Map file round trip. The format is a human-readable key/value document,
/// versioned with `format_version`. Throws ParseError on malformed input.
LaneMap load_map(std::istream& in);
LaneMap load_map_file(const std::string& path);
void save_map(const LaneMap& map, std::ostream& out);

/// Inflation margin applied to the conflict hull, meters.
inline constexpr double kIntersectionInflation = 5.0;

}  // namespace aim
