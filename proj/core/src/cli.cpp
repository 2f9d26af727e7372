#include "aim/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "aim/harness.hpp"
#include "aim/orchestrator.hpp"
#include "aim/policy.hpp"
#include "aim/scenario.hpp"
#include "aim/wire.hpp"

namespace aim {
namespace {

namespace fs = std::filesystem;

LaneMap resolve_map(const std::string& map_arg) {
  if (map_arg.empty() || map_arg == "builtin") {
    return make_cross_map();
  }
  return load_map_file(map_arg);
}

int run_one(const Scenario& scenario, const LaneMap& map, RunMode mode,
            const Policy& policy, const EpisodeConfig& cfg, std::uint64_t seed,
            const std::string& out_dir) {
  EpisodeLog log = run_episode(scenario, map, mode, policy, cfg, seed);
  std::cout << "episode " << scenario.name << " mode " << to_string(mode) << ": "
            << log.end_status << ", " << log.collisions.size() << " collision(s), "
            << log.triggers.size() << " planning trigger(s)\n";
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    const fs::path path =
        fs::path(out_dir) / (scenario.name + "_" + to_string(mode) + ".log");
    std::ofstream out(path);
    write_episode_log(log, out);
    if (scenario.type == "vil" && scenario.vehicles.size() == 2) {
      const auto rm = relative_motion(log, map, scenario.vehicles[0].id,
                                      scenario.vehicles[1].id);
      write_relative_motion(rm, (fs::path(out_dir) / (scenario.name + "_" +
                                                      to_string(mode) +
                                                      "_relative_motion.txt"))
                                    .string());
    }
    std::cout << "wrote " << path.string() << "\n";
  }
  return log.end_status == "aborted" ? 1 : 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"Cooperative intersection planning stack"};
  app.require_subcommand(1);

  std::string map_arg = "builtin";
  std::string policy_arg = "heuristic";
  std::string out_dir;
  std::string mode_arg = "cyclic";
  std::string scenario_path;
  std::string dump_rollout;
  std::uint64_t seed = 1;
  int scenario_count = 40;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--map", map_arg, "Map file path or 'builtin'");
    cmd->add_option("--policy", policy_arg, "Behavior policy: heuristic | gnn:<weights>");
    cmd->add_option("--seed", seed, "Random seed");
    cmd->add_option("--out", out_dir, "Output directory");
    cmd->add_option("--dump-rollout", dump_rollout, "Directory for rollout traces");
  };

  CLI::App* cmd_run = app.add_subcommand("run", "Run one scenario");
  cmd_run->add_option("--scenario", scenario_path, "Scenario file")->required();
  cmd_run->add_option("--mode", mode_arg, "single | cyclic | both");
  add_common(cmd_run);

  CLI::App* cmd_batch =
      app.add_subcommand("batch", "Run N random scenarios in both modes");
  cmd_batch->add_option("--scenarios", scenario_count, "Number of scenarios");
  add_common(cmd_batch);

  CLI::App* cmd_report = app.add_subcommand("report", "Recompute metrics from logs");
  cmd_report->add_option("--out", out_dir, "Directory holding episode logs")->required();

  CLI::App* cmd_validate = app.add_subcommand("validate-map", "Check a map file");
  cmd_validate->add_option("--map", map_arg, "Map file path or 'builtin'")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (cmd_validate->parsed()) {
      const LaneMap map = resolve_map(map_arg);
      const auto problems = map.validate();
      for (const auto& p : problems) {
        std::cerr << "map problem: " << p << "\n";
      }
      if (!problems.empty()) return 2;
      std::cout << "map '" << map.name() << "' ok: " << map.lanes().size() << " lanes, "
                << map.conflicts().size() << " conflict points, "
                << map.entries().size() << " entries\n";
      return 0;
    }

    const LaneMap map = resolve_map(map_arg);
    EpisodeConfig cfg;
    cfg.dump_rollout_dir = dump_rollout;

    if (cmd_run->parsed()) {
      const auto policy = make_policy(policy_arg);
      Scenario scenario = load_scenario_file(scenario_path);
      if (scenario.map_name != "builtin" && scenario.map_name != map.name()) {
        std::cerr << "warning: scenario was written for map '" << scenario.map_name
                  << "', running on '" << map.name() << "'\n";
      }
      int rc = 0;
      if (mode_arg == "both") {
        rc |= run_one(scenario, map, RunMode::kSingle, *policy, cfg, seed, out_dir);
        rc |= run_one(scenario, map, RunMode::kCyclic, *policy, cfg, seed, out_dir);
      } else {
        rc = run_one(scenario, map, parse_run_mode(mode_arg), *policy, cfg, seed, out_dir);
      }
      return rc;
    }

    if (cmd_batch->parsed()) {
      const auto policy = make_policy(policy_arg);
      const auto scenarios = generate_scenarios(map, scenario_count, seed);
      const BatchResult result = run_batch(scenarios, map, *policy, cfg, out_dir);
      std::cout << "batch: " << scenarios.size() << " scenarios, "
                << result.report.order_consistent_count << " order-consistent, "
                << "collisions single/cyclic: " << result.report.total_collisions_single
                << "/" << result.report.total_collisions_cyclic << "\n";
      if (result.report.aborted_episodes > 0) {
        std::cerr << result.report.aborted_episodes << " episode(s) aborted\n";
        return 1;
      }
      return 0;
    }

    if (cmd_report->parsed()) {
      std::vector<EpisodeLog> singles, cyclics;
      std::vector<fs::path> files;
      for (const auto& entry : fs::directory_iterator(out_dir)) {
        if (entry.path().extension() == ".log") files.push_back(entry.path());
      }
      std::sort(files.begin(), files.end());
      std::map<std::string, EpisodeLog> by_key;
      for (const auto& file : files) {
        EpisodeLog log = read_episode_log_file(file.string());
        by_key[log.scenario_name + "/" + log.mode] = std::move(log);
      }
      for (const auto& [key, log] : by_key) {
        if (log.mode == "single") {
          const auto other = by_key.find(log.scenario_name + "/cyclic");
          if (other != by_key.end()) {
            singles.push_back(log);
            cyclics.push_back(other->second);
          }
        }
      }
      if (singles.empty()) {
        std::cerr << "no paired single/cyclic logs under '" << out_dir << "'\n";
        return 2;
      }
      const EvaluationReport report = compute_metrics(singles, cyclics);
      write_report(report, out_dir);
      std::cout << "report over " << singles.size() << " scenario pairs written to "
                << out_dir << "\n";
      return 0;
    }
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace aim
