#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iterator>
#include <ostream>
#include <sstream>

#include "aim/orchestrator.hpp"
#include "aim/wire.hpp"
#include "text_io.hpp"

namespace aim {
namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::string now_string() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  char buf[64];
  std::tm tm_utc{};
  gmtime_r(&tt, &tm_utc);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

TriggerKind parse_trigger_kind(const std::string& s, std::size_t at) {
  if (s == "initial") return TriggerKind::kInitial;
  if (s == "new-vehicle") return TriggerKind::kNewVehicle;
  if (s == "conflict-ruled-out") return TriggerKind::kConflictRuledOut;
  if (s == "cyclic") return TriggerKind::kCyclic;
  throw ParseError("trigger", at, "unknown trigger kind '" + s + "'");
}

}  // namespace

void write_episode_log(const EpisodeLog& log, std::ostream& out) {
  out << "# aim-episode-v1\n";
  out << "# generated " << now_string() << "\n";
  out << "meta scenario " << log.scenario_name << " mode " << log.mode << " map "
      << log.map_name << " seed " << log.seed << " end " << fmt(log.end_time) << " "
      << log.end_status;
  if (!log.abort_reason.empty()) out << " " << log.abort_reason;
  out << "\n";
  for (const auto& v : log.vehicles) {
    out << "V " << v.id << " lane " << v.lane << " arc " << fmt(v.arc) << " speed "
        << fmt(v.speed) << " route ";
    for (std::size_t i = 0; i < v.route.lanes.size(); ++i) {
      if (i) out << ",";
      out << v.route.lanes[i];
    }
    out << " controllable " << (v.controllable ? 1 : 0) << " spawn " << fmt(v.spawn_time);
    if (v.scripted_speed) out << " script " << fmt(*v.scripted_speed);
    out << "\n";
  }
  for (const auto& t : log.triggers) {
    out << "T " << fmt(t.time) << " " << to_string(t.kind) << " "
        << (t.vehicle_id >= 0 ? std::to_string(t.vehicle_id) : "-") << " "
        << (t.detail.empty() ? "-" : t.detail) << "\n";
  }
  for (const auto& o : log.objectives) {
    out << "O " << fmt(o.time) << " " << o.objective.vehicle_id << " issued "
        << fmt(o.objective.issue_time) << " anchor ";
    if (o.objective.anchors.empty()) {
      out << "- - - -";
    } else {
      const auto& ap = o.objective.anchors.front();
      out << fmt(ap.dt) << " " << fmt(ap.speed) << " " << fmt(ap.position.x) << " "
          << fmt(ap.position.y);
    }
    out << " flags " << (o.objective.timeout_no_anchor ? 1 : 0) << " infeasible "
        << (o.planner_infeasible ? 1 : 0) << " follow " << (o.follow_engaged ? 1 : 0)
        << "\n";
  }
  for (const auto& w : log.world) {
    out << "W " << fmt(w.t) << " " << w.id << " " << fmt(w.pose.x) << " " << fmt(w.pose.y)
        << " " << fmt(w.pose.heading) << " " << fmt(w.speed) << " " << fmt(w.accel) << "\n";
  }
  for (const auto& c : log.collisions) {
    out << "C " << fmt(c.t) << " " << c.id_a << " " << c.id_b << " " << fmt(c.penetration)
        << "\n";
  }
  for (const auto& [t, id] : log.entries) {
    out << "E " << fmt(t) << " " << id << "\n";
  }
  for (const auto& [t, id] : log.exits) {
    out << "X " << fmt(t) << " " << id << "\n";
  }
  for (const auto& [t, id, engaged] : log.follow_events) {
    out << "F " << fmt(t) << " " << id << " " << (engaged ? 1 : 0) << "\n";
  }
  out << "end\n";
}

EpisodeLog read_episode_log(std::istream& in) {
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  detail::LineScanner scan(std::move(data));
  EpisodeLog log;
  std::string line;
  std::size_t at = 0;
  while (scan.next(line, at)) {
    const auto toks = detail::split_ws(line);
    const std::string& key = toks[0];
    if (key == "meta") {
      for (std::size_t i = 1; i + 1 < toks.size(); i += 2) {
        if (toks[i] == "scenario") {
          log.scenario_name = toks[i + 1];
        } else if (toks[i] == "mode") {
          log.mode = toks[i + 1];
        } else if (toks[i] == "map") {
          log.map_name = toks[i + 1];
        } else if (toks[i] == "seed") {
          log.seed = static_cast<std::uint64_t>(detail::parse_int(toks[i + 1], "seed", at));
        } else if (toks[i] == "end") {
          log.end_time = detail::parse_double(toks[i + 1], "end", at);
          if (i + 2 < toks.size()) log.end_status = toks[i + 2];
          break;
        }
      }
    } else if (key == "V") {
      ScenarioVehicle v;
      v.id = static_cast<int>(detail::parse_int(toks[1], "V", at));
      for (std::size_t i = 2; i + 1 < toks.size(); i += 2) {
        if (toks[i] == "lane") v.lane = toks[i + 1];
        else if (toks[i] == "arc") v.arc = detail::parse_double(toks[i + 1], "V", at);
        else if (toks[i] == "speed") v.speed = detail::parse_double(toks[i + 1], "V", at);
        else if (toks[i] == "route") v.route.lanes = detail::split_on(toks[i + 1], ',');
        else if (toks[i] == "controllable")
          v.controllable = detail::parse_int(toks[i + 1], "V", at) != 0;
        else if (toks[i] == "spawn") v.spawn_time = detail::parse_double(toks[i + 1], "V", at);
        else if (toks[i] == "script")
          v.scripted_speed = detail::parse_double(toks[i + 1], "V", at);
      }
      log.vehicles.push_back(std::move(v));
    } else if (key == "T") {
      if (toks.size() != 5) throw ParseError("T", at, "expected 'T <t> <kind> <veh> <detail>'");
      TriggerRecord t;
      t.time = detail::parse_double(toks[1], "T", at);
      t.kind = parse_trigger_kind(toks[2], at);
      t.vehicle_id = toks[3] == "-" ? -1 : static_cast<int>(detail::parse_int(toks[3], "T", at));
      t.detail = toks[4] == "-" ? "" : toks[4];
      log.triggers.push_back(std::move(t));
    } else if (key == "O") {
      if (toks.size() != 16) throw ParseError("O", at, "malformed objective record");
      ObjectiveRecord o;
      o.time = detail::parse_double(toks[1], "O", at);
      o.objective.vehicle_id = static_cast<int>(detail::parse_int(toks[2], "O", at));
      o.objective.issue_time = detail::parse_double(toks[4], "O", at);
      if (toks[6] != "-") {
        AnchorPoint ap;
        ap.dt = detail::parse_double(toks[6], "O", at);
        ap.speed = detail::parse_double(toks[7], "O", at);
        ap.position.x = detail::parse_double(toks[8], "O", at);
        ap.position.y = detail::parse_double(toks[9], "O", at);
        o.objective.anchors.push_back(ap);
      }
      o.objective.timeout_no_anchor = detail::parse_int(toks[11], "O", at) != 0;
      o.planner_infeasible = detail::parse_int(toks[13], "O", at) != 0;
      o.follow_engaged = detail::parse_int(toks[15], "O", at) != 0;
      log.objectives.push_back(std::move(o));
    } else if (key == "W") {
      if (toks.size() != 8) throw ParseError("W", at, "expected 7 fields");
      WorldSample w;
      w.t = detail::parse_double(toks[1], "W", at);
      w.id = static_cast<int>(detail::parse_int(toks[2], "W", at));
      w.pose.x = detail::parse_double(toks[3], "W", at);
      w.pose.y = detail::parse_double(toks[4], "W", at);
      w.pose.heading = detail::parse_double(toks[5], "W", at);
      w.speed = detail::parse_double(toks[6], "W", at);
      w.accel = detail::parse_double(toks[7], "W", at);
      log.world.push_back(w);
    } else if (key == "C") {
      if (toks.size() != 5) throw ParseError("C", at, "expected 4 fields");
      CollisionEvent c;
      c.t = detail::parse_double(toks[1], "C", at);
      c.id_a = static_cast<int>(detail::parse_int(toks[2], "C", at));
      c.id_b = static_cast<int>(detail::parse_int(toks[3], "C", at));
      c.penetration = detail::parse_double(toks[4], "C", at);
      log.collisions.push_back(c);
    } else if (key == "E") {
      log.entries.push_back({detail::parse_double(toks[1], "E", at),
                             static_cast<int>(detail::parse_int(toks[2], "E", at))});
    } else if (key == "X") {
      log.exits.push_back({detail::parse_double(toks[1], "X", at),
                           static_cast<int>(detail::parse_int(toks[2], "X", at))});
    } else if (key == "F") {
      log.follow_events.push_back({detail::parse_double(toks[1], "F", at),
                                   static_cast<int>(detail::parse_int(toks[2], "F", at)),
                                   detail::parse_int(toks[3], "F", at) != 0});
    } else if (key == "end") {
      break;
    } else {
      throw ParseError(key, at, "unknown record type");
    }
  }
  return log;
}

EpisodeLog read_episode_log_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open episode log '" + path + "'");
  return read_episode_log(in);
}

}  // namespace aim
