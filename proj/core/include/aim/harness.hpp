#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "aim/orchestrator.hpp"
#include "aim/scenario.hpp"

namespace aim {

struct ScenarioMetrics {
  std::string scenario;
  int vehicle_count = 0;
  bool both_completed = false;
  bool order_consistent = false;
  int collisions_single = 0;
  int collisions_cyclic = 0;
  std::vector<std::pair<int, double>> anchor_deviation;  // vehicle id, |dt|
};

struct EvaluationReport {
  std::vector<ScenarioMetrics> scenarios;
  /// Pooled per-vehicle anchor-time deviations of order-consistent scenarios.
  std::vector<double> deviations;
  std::map<int, double> median_speed_single;   // by vehicle count
  std::map<int, double> median_speed_cyclic;
  std::map<int, double> median_accel_single;   // median |a|
  std::map<int, double> median_accel_cyclic;
  int total_collisions_single = 0;
  int total_collisions_cyclic = 0;
  int order_consistent_count = 0;
  int aborted_episodes = 0;
};

/// Vehicles ordered by the time their pose first enters the intersection
/// polygon; vehicles that never enter are excluded.
std::vector<std::pair<int, double>> crossing_order(const EpisodeLog& log);

/// Pairs single/cyclic episode logs of the same scenarios and computes the
/// evaluation metrics: crossing-order consistency, last-issued anchor time
/// deviations (order-consistent scenarios only), median speed and median
/// absolute acceleration bucketed by vehicle count, collision totals.
EvaluationReport compute_metrics(const std::vector<EpisodeLog>& single_logs,
                                 const std::vector<EpisodeLog>& cyclic_logs);

/// Plot-data and summary files (delimited text) under `out_dir`.
void write_report(const EvaluationReport& report, const std::string& out_dir);

/// Relative motion of two vehicles in the conflict-point frame (Fig.-7-style
/// trace data) plus derived safety measures.
struct RelativeMotion {
  std::vector<std::array<double, 3>> rows;  // t, s_ego, s_obj
  double min_clearance = 0.0;               // min oriented-box clearance
  std::optional<double> ego_s_at_obj_crossing;
};
RelativeMotion relative_motion(const EpisodeLog& log, const LaneMap& map, int ego_id,
                               int obj_id);
void write_relative_motion(const RelativeMotion& rm, const std::string& path);

struct BatchResult {
  EvaluationReport report;
  std::vector<EpisodeLog> single_logs;
  std::vector<EpisodeLog> cyclic_logs;
};

/// Runs every scenario in both planning modes, writes episode logs (and the
/// scenario files) under `out_dir` when non-empty, and computes the report.
BatchResult run_batch(const std::vector<Scenario>& scenarios, const LaneMap& map,
                      const Policy& policy, const EpisodeConfig& cfg,
                      const std::string& out_dir);

}  // namespace aim
