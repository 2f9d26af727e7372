#include "aim/harness.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "aim/wire.hpp"

namespace aim {
namespace {

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

/// Absolute time of the last anchored objective per vehicle.
std::map<int, double> last_anchor_times(const EpisodeLog& log) {
  std::map<int, double> out;
  for (const auto& rec : log.objectives) {
    if (rec.objective.anchors.empty()) continue;
    out[rec.objective.vehicle_id] =
        rec.objective.issue_time + rec.objective.anchors.front().dt;
  }
  return out;
}

}  // namespace

std::vector<std::pair<int, double>> crossing_order(const EpisodeLog& log) {
  std::vector<std::pair<int, double>> order;
  for (const auto& [t, id] : log.entries) {
    order.push_back({id, t});
  }
  std::sort(order.begin(), order.end(),
            [](const auto& a, const auto& b) { return a.second < b.second; });
  return order;
}

EvaluationReport compute_metrics(const std::vector<EpisodeLog>& single_logs,
                                 const std::vector<EpisodeLog>& cyclic_logs) {
  if (single_logs.size() != cyclic_logs.size()) {
    throw std::invalid_argument("compute_metrics needs paired single/cyclic logs");
  }
  EvaluationReport report;
  std::map<int, std::vector<double>> speeds_single, speeds_cyclic;
  std::map<int, std::vector<double>> accels_single, accels_cyclic;

  for (std::size_t i = 0; i < single_logs.size(); ++i) {
    const EpisodeLog& ls = single_logs[i];
    const EpisodeLog& lc = cyclic_logs[i];
    ScenarioMetrics m;
    m.scenario = ls.scenario_name;
    m.vehicle_count = static_cast<int>(ls.vehicles.size());
    m.collisions_single = static_cast<int>(ls.collisions.size());
    m.collisions_cyclic = static_cast<int>(lc.collisions.size());
    report.total_collisions_single += m.collisions_single;
    report.total_collisions_cyclic += m.collisions_cyclic;
    if (ls.end_status == "aborted") ++report.aborted_episodes;
    if (lc.end_status == "aborted") ++report.aborted_episodes;
    m.both_completed = ls.end_status == "completed" && lc.end_status == "completed";

    const auto order_s = crossing_order(ls);
    const auto order_c = crossing_order(lc);
    // Crossing-order comparison is only defined when both modes completed.
    if (m.both_completed && order_s.size() == order_c.size()) {
      m.order_consistent = true;
      for (std::size_t k = 0; k < order_s.size(); ++k) {
        if (order_s[k].first != order_c[k].first) {
          m.order_consistent = false;
          break;
        }
      }
    }
    if (m.order_consistent) {
      ++report.order_consistent_count;
      const auto anchors_s = last_anchor_times(ls);
      const auto anchors_c = last_anchor_times(lc);
      for (const auto& [id, ts] : anchors_s) {
        const auto it = anchors_c.find(id);
        if (it == anchors_c.end()) continue;
        const double dev = std::abs(ts - it->second);
        m.anchor_deviation.push_back({id, dev});
        report.deviations.push_back(dev);
      }
    }

    for (const auto& w : ls.world) {
      speeds_single[m.vehicle_count].push_back(w.speed);
      accels_single[m.vehicle_count].push_back(std::abs(w.accel));
    }
    for (const auto& w : lc.world) {
      speeds_cyclic[m.vehicle_count].push_back(w.speed);
      accels_cyclic[m.vehicle_count].push_back(std::abs(w.accel));
    }
    report.scenarios.push_back(std::move(m));
  }

  for (auto& [count, values] : speeds_single) report.median_speed_single[count] = median(values);
  for (auto& [count, values] : speeds_cyclic) report.median_speed_cyclic[count] = median(values);
  for (auto& [count, values] : accels_single) report.median_accel_single[count] = median(values);
  for (auto& [count, values] : accels_cyclic) report.median_accel_cyclic[count] = median(values);
  return report;
}

void write_report(const EvaluationReport& report, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);

  {
    std::ofstream out(fs::path(out_dir) / "anchor_deviation_hist.txt");
    out << "# bin_lo bin_hi count\n";
    const double bin = 0.25;
    const int bins = 17;  // up to 4 s, overflow in the last bin
    std::vector<int> counts(bins, 0);
    for (double d : report.deviations) {
      const int idx = std::min(static_cast<int>(d / bin), bins - 1);
      counts[idx]++;
    }
    for (int i = 0; i < bins; ++i) {
      out << format_double(i * bin) << " " << format_double((i + 1) * bin) << " "
          << counts[i] << "\n";
    }
  }
  {
    std::ofstream out(fs::path(out_dir) / "velocity_by_count.txt");
    out << "# vehicles median_speed_single median_speed_cyclic\n";
    for (const auto& [count, med] : report.median_speed_single) {
      const auto it = report.median_speed_cyclic.find(count);
      out << count << " " << format_double(med) << " "
          << format_double(it != report.median_speed_cyclic.end() ? it->second : 0.0)
          << "\n";
    }
  }
  {
    std::ofstream out(fs::path(out_dir) / "acceleration_by_count.txt");
    out << "# vehicles median_abs_accel_single median_abs_accel_cyclic\n";
    for (const auto& [count, med] : report.median_accel_single) {
      const auto it = report.median_accel_cyclic.find(count);
      out << count << " " << format_double(med) << " "
          << format_double(it != report.median_accel_cyclic.end() ? it->second : 0.0)
          << "\n";
    }
  }
  {
    std::ofstream out(fs::path(out_dir) / "crossing_orders.txt");
    out << "# scenario vehicles consistent collisions_single collisions_cyclic\n";
    for (const auto& m : report.scenarios) {
      out << m.scenario << " " << m.vehicle_count << " " << (m.order_consistent ? 1 : 0)
          << " " << m.collisions_single << " " << m.collisions_cyclic << "\n";
    }
  }
  {
    std::ofstream out(fs::path(out_dir) / "report_summary.txt");
    out << "scenarios " << report.scenarios.size() << "\n";
    out << "order_consistent " << report.order_consistent_count << "\n";
    out << "collisions_single " << report.total_collisions_single << "\n";
    out << "collisions_cyclic " << report.total_collisions_cyclic << "\n";
    out << "aborted_episodes " << report.aborted_episodes << "\n";
    out << "anchor_deviations " << report.deviations.size() << "\n";
    int within = 0;
    for (double d : report.deviations) {
      if (d <= 1.5) ++within;
    }
    out << "anchor_deviations_within_1.5s " << within << "\n";
  }
}

RelativeMotion relative_motion(const EpisodeLog& log, const LaneMap& map, int ego_id,
                               int obj_id) {
  const ScenarioVehicle* ego = nullptr;
  const ScenarioVehicle* obj = nullptr;
  for (const auto& v : log.vehicles) {
    if (v.id == ego_id) ego = &v;
    if (v.id == obj_id) obj = &v;
  }
  if (!ego || !obj) throw std::invalid_argument("relative_motion: unknown vehicle ids");

  const auto conflicts = map.shared_conflicts(ego->route, obj->route);
  double conf_ego = -1.0, conf_obj = -1.0;
  for (const auto& c : conflicts) {
    if (c.kind == ConflictKind::kCrossing) {
      conf_ego = c.s_on_a;
      conf_obj = c.s_on_b;
      break;
    }
  }
  if (conf_ego < 0.0) {
    throw std::invalid_argument("relative_motion: routes share no crossing conflict");
  }
  const RoutePath path_ego = map.route_path(ego->route);
  const RoutePath path_obj = map.route_path(obj->route);

  std::map<double, std::array<const WorldSample*, 2>> by_time;
  for (const auto& w : log.world) {
    if (w.id == ego_id) by_time[w.t][0] = &w;
    if (w.id == obj_id) by_time[w.t][1] = &w;
  }

  RelativeMotion rm;
  rm.min_clearance = std::numeric_limits<double>::infinity();
  double prev_obj_s = -std::numeric_limits<double>::infinity();
  double prev_ego_s = 0.0;
  for (const auto& [t, pair] : by_time) {
    if (!pair[0] || !pair[1]) continue;
    const double s_ego = path_ego.poly.project(pair[0]->pose.position()).s - conf_ego;
    const double s_obj = path_obj.poly.project(pair[1]->pose.position()).s - conf_obj;
    rm.rows.push_back({t, s_ego, s_obj});
    rm.min_clearance = std::min(
        rm.min_clearance, box_clearance(pair[0]->pose, pair[1]->pose, 5.0, 2.0));
    if (!rm.ego_s_at_obj_crossing && prev_obj_s < 0.0 && s_obj >= 0.0) {
      const double frac = (0.0 - prev_obj_s) / std::max(s_obj - prev_obj_s, 1e-9);
      rm.ego_s_at_obj_crossing = prev_ego_s + frac * (s_ego - prev_ego_s);
    }
    prev_obj_s = s_obj;
    prev_ego_s = s_ego;
  }
  return rm;
}

void write_relative_motion(const RelativeMotion& rm, const std::string& path) {
  std::ofstream out(path);
  out << "# t s_ego s_obj\n";
  for (const auto& row : rm.rows) {
    out << format_double(row[0]) << " " << format_double(row[1]) << " "
        << format_double(row[2]) << "\n";
  }
  out << "# min_clearance " << format_double(rm.min_clearance) << "\n";
  if (rm.ego_s_at_obj_crossing) {
    out << "# ego_s_at_obj_crossing " << format_double(*rm.ego_s_at_obj_crossing) << "\n";
  }
}

BatchResult run_batch(const std::vector<Scenario>& scenarios, const LaneMap& map,
                      const Policy& policy, const EpisodeConfig& cfg,
                      const std::string& out_dir) {
  namespace fs = std::filesystem;
  BatchResult result;
  const bool write_files = !out_dir.empty();
  if (write_files) fs::create_directories(out_dir);

  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    const Scenario& sc = scenarios[i];
    if (write_files) {
      std::ofstream out(fs::path(out_dir) / (sc.name + ".scenario"));
      save_scenario(sc, out);
    }
    for (const RunMode mode : {RunMode::kSingle, RunMode::kCyclic}) {
      EpisodeLog log = run_episode(sc, map, mode, policy, cfg, sc.seed);
      if (write_files) {
        std::ofstream out(fs::path(out_dir) /
                          (sc.name + "_" + to_string(mode) + ".log"));
        write_episode_log(log, out);
      }
      if (mode == RunMode::kSingle) {
        result.single_logs.push_back(std::move(log));
      } else {
        result.cyclic_logs.push_back(std::move(log));
      }
    }
  }
  result.report = compute_metrics(result.single_logs, result.cyclic_logs);
  if (write_files) write_report(result.report, out_dir);
  return result;
}

}  // namespace aim
