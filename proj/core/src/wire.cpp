#include "aim/wire.hpp"

#include <cstdio>
#include <sstream>

#include "text_io.hpp"

namespace aim {
namespace {

using detail::parse_double;
using detail::parse_int;
using detail::split_ws;

// Incremental line reader that tracks byte offsets for error reporting.
class RecordReader {
 public:
  RecordReader(const std::string& bytes, std::size_t start) : bytes_(bytes), pos_(start) {}

  std::size_t pos() const { return pos_; }

  std::string line(const std::string& field) {
    if (pos_ >= bytes_.size()) {
      throw ParseError(field, pos_, "unexpected end of record");
    }
    const std::size_t nl = bytes_.find('\n', pos_);
    if (nl == std::string::npos) {
      throw ParseError(field, pos_, "missing newline");
    }
    std::string out = bytes_.substr(pos_, nl - pos_);
    pos_ = nl + 1;
    return out;
  }

 private:
  const std::string& bytes_;
  std::size_t pos_;
};

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string serialize_objective(const MotionPlanningObjective& obj) {
  std::ostringstream body;
  body << "objective_v1\n";
  body << "vehicle " << obj.vehicle_id << "\n";
  body << "issued " << format_double(obj.issue_time) << "\n";
  body << "flags " << (obj.timeout_no_anchor ? 1 : 0) << "\n";
  body << "path " << obj.path.size() << "\n";
  for (const auto& p : obj.path) {
    body << format_double(p.x) << " " << format_double(p.y) << "\n";
  }
  body << "vmax " << obj.max_speed.size() << "\n";
  for (double v : obj.max_speed) {
    body << format_double(v) << "\n";
  }
  body << "anchors " << obj.anchors.size() << "\n";
  for (const auto& ap : obj.anchors) {
    body << format_double(ap.position.x) << " " << format_double(ap.position.y) << " "
         << format_double(ap.dt) << " " << format_double(ap.speed) << "\n";
  }
  body << "end\n";
  const std::string s = body.str();
  return std::to_string(s.size()) + "\n" + s;
}

MotionPlanningObjective deserialize_objective(const std::string& bytes) {
  const std::size_t nl = bytes.find('\n');
  if (nl == std::string::npos) {
    throw ParseError("length", 0, "missing length prefix");
  }
  const std::string len_tok = bytes.substr(0, nl);
  const long long body_len = parse_int(len_tok, "length", 0);
  if (body_len < 0 || static_cast<std::size_t>(body_len) != bytes.size() - nl - 1) {
    throw ParseError("length", 0,
                     "length prefix " + len_tok + " does not match body size " +
                         std::to_string(bytes.size() - nl - 1));
  }

  RecordReader rd(bytes, nl + 1);
  MotionPlanningObjective obj;

  std::size_t at = rd.pos();
  if (rd.line("magic") != "objective_v1") {
    throw ParseError("magic", at, "expected 'objective_v1'");
  }

  auto expect_kv = [&](const std::string& field) -> std::vector<std::string> {
    at = rd.pos();
    auto toks = split_ws(rd.line(field));
    if (toks.size() < 2 || toks[0] != field) {
      throw ParseError(field, at, "expected '" + field + " <value>'");
    }
    return toks;
  };

  obj.vehicle_id = static_cast<int>(parse_int(expect_kv("vehicle")[1], "vehicle", at));
  obj.issue_time = parse_double(expect_kv("issued")[1], "issued", at);
  obj.timeout_no_anchor = parse_int(expect_kv("flags")[1], "flags", at) & 1;

  const long long n_path = parse_int(expect_kv("path")[1], "path", at);
  if (n_path < 0) throw ParseError("path", at, "negative count");
  for (long long i = 0; i < n_path; ++i) {
    at = rd.pos();
    const auto toks = split_ws(rd.line("path point"));
    if (toks.size() != 2) throw ParseError("path point", at, "expected '<x> <y>'");
    obj.path.push_back({parse_double(toks[0], "path point", at),
                        parse_double(toks[1], "path point", at)});
  }

  const long long n_vmax = parse_int(expect_kv("vmax")[1], "vmax", at);
  if (n_vmax < 0) throw ParseError("vmax", at, "negative count");
  for (long long i = 0; i < n_vmax; ++i) {
    at = rd.pos();
    obj.max_speed.push_back(parse_double(rd.line("vmax value"), "vmax value", at));
  }

  const long long n_ap = parse_int(expect_kv("anchors")[1], "anchors", at);
  if (n_ap < 0) throw ParseError("anchors", at, "negative count");
  for (long long i = 0; i < n_ap; ++i) {
    at = rd.pos();
    const auto toks = split_ws(rd.line("anchor"));
    if (toks.size() != 4) throw ParseError("anchor", at, "expected '<x> <y> <dt> <v>'");
    AnchorPoint ap;
    ap.position = {parse_double(toks[0], "anchor", at), parse_double(toks[1], "anchor", at)};
    ap.dt = parse_double(toks[2], "anchor", at);
    ap.speed = parse_double(toks[3], "anchor", at);
    obj.anchors.push_back(ap);
  }

  at = rd.pos();
  if (rd.line("end") != "end") {
    throw ParseError("end", at, "expected 'end'");
  }
  return obj;
}

}  // namespace aim
