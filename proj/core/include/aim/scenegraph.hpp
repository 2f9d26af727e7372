#pragma once

#include <array>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "aim/envmodel.hpp"
#include "aim/lane_map.hpp"

namespace aim {

/// Raised when a vehicle cannot be matched to its assumed route geometry.
class VehicleOffMapError : public std::runtime_error {
 public:
  VehicleOffMapError(int vehicle_id, double lateral)
      : std::runtime_error("vehicle " + std::to_string(vehicle_id) +
                           " is off-map (lateral offset " + std::to_string(lateral) + " m)"),
        vehicle_id_(vehicle_id) {}
  int vehicle_id() const { return vehicle_id_; }

 private:
  int vehicle_id_;
};

struct VertexFeatures {
  int vehicle_id = 0;
  double s_to_entry = 0.0;      // m, negative while approaching the entry
  double speed = 0.0;           // m/s
  double lane_speed_limit = 0.0;  // m/s
  bool controllable = false;
};

enum class RelationKind { kCrossing, kMerging, kFollowing };

struct EdgeFeatures {
  RelationKind kind = RelationKind::kCrossing;
  /// Distance between the vehicles along the conflict geometry: remaining
  /// distance of both to the shared conflict point, or the gap for
  /// same-lane following.
  double distance = 0.0;
  double source_to_conflict = 0.0;  // per-endpoint remaining distance
  double target_to_conflict = 0.0;
  /// +1: source has right of way over target, -1: target over source.
  int priority = 0;
};

struct GraphEdge {
  int source = 0;  // smaller vehicle id
  int target = 0;
  EdgeFeatures features;
};

struct ObservationGraph {
  std::vector<VertexFeatures> vertices;  // ascending vehicle id
  std::vector<GraphEdge> edges;          // sorted by (source, target)

  int vertex_index(int vehicle_id) const;
};

/// Feature scaling applied before the policy network.
inline constexpr double kPositionScale = 100.0;
inline constexpr double kSpeedScale = 15.0;
inline constexpr int kVertexInputDim = 4;
inline constexpr int kEdgeInputDim = 7;

std::array<double, kVertexInputDim> vertex_input(const VertexFeatures& v);
/// Edge inputs as seen from one direction; `reversed` swaps the endpoint
/// roles and flips the priority sign.
std::array<double, kEdgeInputDim> edge_input(const EdgeFeatures& e, bool reversed);

/// Builds the graph observation of a snapshot. `assumed_routes` must hold at
/// least one route hypothesis per vehicle (several for vehicles with unknown
/// intent; their conflict sets are unioned). Throws VehicleOffMapError when a
/// vehicle is more than 3 m off every assumed route.
ObservationGraph build_observation(const EnvironmentModel& em, const LaneMap& map,
                                   const std::map<int, std::vector<RouteSpec>>& assumed_routes);

/// Structured text dump for golden tests and debugging.
std::string dump_graph(const ObservationGraph& g);

/// Right-of-way between two approaches: +1 if a has priority over b, -1 the
/// other way, 0 undetermined. Exposed for the reservation policy tests.
struct ApproachInfo {
  bool priority_road = false;
  double entry_heading = 0.0;
  int turn = 0;  // -1 right, 0 straight, +1 left
};
ApproachInfo approach_info(const LaneMap& map, const RouteSpec& route);
int priority_rank(const ApproachInfo& a, const ApproachInfo& b);

}  // namespace aim
