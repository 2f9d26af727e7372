#include "aim/envmodel.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace aim {

const VehicleRecord* EnvironmentModel::find(int id) const {
  for (const auto& v : vehicles) {
    if (v.id == id) return &v;
  }
  return nullptr;
}

std::optional<std::string> validate_objective(const MotionPlanningObjective& obj) {
  if (obj.path.size() < 2) return "path needs at least 2 waypoints";
  double len = 0.0;
  for (std::size_t i = 1; i < obj.path.size(); ++i) {
    len += distance(obj.path[i - 1], obj.path[i]);
  }
  if (len <= 0.0) return "path arc length must be positive";
  if (obj.max_speed.size() != obj.path.size() - 1) {
    return "max_speed needs one entry per path segment";
  }
  for (double v : obj.max_speed) {
    if (!(v > 0.0) || !std::isfinite(v)) return "speed bounds must be positive";
  }
  const Polyline path(obj.path);
  for (const auto& ap : obj.anchors) {
    if (!(ap.dt > 0.0)) return "anchor dt must be positive";
    if (ap.speed < 0.0) return "anchor speed must be non-negative";
    if (path.project(ap.position).distance > kAnchorLateralTolerance) {
      return "anchor position off the objective path";
    }
  }
  return std::nullopt;
}

std::optional<std::string> validate_environment(const EnvironmentModel& em) {
  std::set<int> ids;
  for (const auto& v : em.vehicles) {
    if (!ids.insert(v.id).second) return "duplicate vehicle id";
    if (v.speed < 0.0) return "vehicle speed must be non-negative";
    if (!std::isfinite(v.pose.x) || !std::isfinite(v.pose.y) ||
        !std::isfinite(v.pose.heading)) {
      return "vehicle pose must be finite";
    }
    if (v.controllable && !v.route.has_value()) {
      return "controllable vehicle without a route";
    }
    if (v.route && v.route->lanes.empty()) return "declared route is empty";
  }
  return std::nullopt;
}

}  // namespace aim
