#include "aim/policy.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "aim/wire.hpp"
#include "text_io.hpp"

namespace aim {
namespace {

double clamp_action(double a) { return std::clamp(a, -kActionLimit, kActionLimit); }

std::vector<double> matvec(const Tensor& w, const Tensor& b, const std::vector<double>& x) {
  std::vector<double> out(w.rows, 0.0);
  for (std::size_t r = 0; r < w.rows; ++r) {
    double acc = b.data[r];
    for (std::size_t c = 0; c < w.cols; ++c) {
      acc += w.at(r, c) * x[c];
    }
    out[r] = acc;
  }
  return out;
}

void relu_inplace(std::vector<double>& v) {
  for (double& x : v) x = std::max(x, 0.0);
}

std::vector<double> concat(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out;
  out.reserve(a.size() + b.size());
  out.insert(out.end(), a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

}  // namespace

JointAction HeuristicPolicy::select_action(const ObservationGraph& obs) const {
  return heuristic_reservation_policy(obs, params_);
}

JointAction heuristic_reservation_policy(const ObservationGraph& obs,
                                         const HeuristicParams& p) {
  const std::size_t n = obs.vertices.size();
  JointAction action;
  action.accel.resize(n);

  // Baseline: proportional speed-limit tracking.
  for (std::size_t i = 0; i < n; ++i) {
    const auto& v = obs.vertices[i];
    action.accel[i] = clamp_action(p.k_speed_track * (v.lane_speed_limit - v.speed));
  }

  for (const auto& e : obs.edges) {
    const int si = obs.vertex_index(e.source);
    const int ti = obs.vertex_index(e.target);
    if (si < 0 || ti < 0) continue;
    const auto& sv = obs.vertices[si];
    const auto& tv = obs.vertices[ti];

    if (e.features.kind == RelationKind::kFollowing) {
      const bool source_trails = e.features.source_to_conflict > 0.0;
      const int follower = source_trails ? si : ti;
      const double v_f = source_trails ? sv.speed : tv.speed;
      const double v_l = source_trails ? tv.speed : sv.speed;
      const double bumper_gap = e.features.distance - p.vehicle_length;
      const double a = time_gap_accel(bumper_gap, v_f, v_l, p.follow);
      action.accel[follower] = std::min(action.accel[follower], clamp_action(a));
      continue;
    }

    // Conflict reservation: the priority holder goes first; with equal
    // rights, predicted arrival under constant speed decides.
    int holder, yielder;
    if (e.features.priority > 0) {
      holder = si;
      yielder = ti;
    } else if (e.features.priority < 0) {
      holder = ti;
      yielder = si;
    } else {
      const double t_s = e.features.source_to_conflict / std::max(sv.speed, 0.5);
      const double t_t = e.features.target_to_conflict / std::max(tv.speed, 0.5);
      if (t_s < t_t || (t_s == t_t && e.source < e.target)) {
        holder = si;
        yielder = ti;
      } else {
        holder = ti;
        yielder = si;
      }
    }
    const double d_h = holder == si ? e.features.source_to_conflict
                                    : e.features.target_to_conflict;
    const double d_y = holder == si ? e.features.target_to_conflict
                                    : e.features.source_to_conflict;
    const double v_h = obs.vertices[holder].speed;
    const double v_y = obs.vertices[yielder].speed;

    const double t_exit = (d_h + p.clear_length) / std::max(v_h, 0.5);
    const double t_req = t_exit + p.headway;

    // Yielding is gated at the intersection entry: while still outside, the
    // vehicle must not cross its entry until it can clear the conflict
    // unimpeded afterwards. The transit estimate assumes the lane limit,
    // which understates the time and so errs toward a later entry.
    const double to_entry = -obs.vertices[yielder].s_to_entry;
    double a;
    if (to_entry > 0.5 && d_y > to_entry) {
      const double limit = std::max(obs.vertices[yielder].lane_speed_limit, 1.0);
      const double transit_min = (d_y - to_entry) / limit;
      a = yield_accel(to_entry - 0.5, v_y, t_req - transit_min, p.stop_margin);
    } else {
      a = yield_accel(d_y - p.enter_margin, v_y, t_req, p.stop_margin);
    }
    if (a < 0.0) {
      action.accel[yielder] = std::min(action.accel[yielder], clamp_action(a));
    }
  }
  return action;
}

std::optional<std::string> validate_weights(const PolicyWeights& w) {
  const std::size_t h = static_cast<std::size_t>(w.hidden);
  if (w.hidden <= 0) return "hidden dimension must be positive";
  auto check = [](const Tensor& t, std::size_t rows, std::size_t cols,
                  const std::string& name) -> std::optional<std::string> {
    if (t.rows != rows || t.cols != cols) {
      return name + ": expected " + std::to_string(rows) + "x" + std::to_string(cols) +
             ", got " + std::to_string(t.rows) + "x" + std::to_string(t.cols);
    }
    if (t.data.size() != rows * cols) return name + ": data size mismatch";
    return std::nullopt;
  };
  if (auto e = check(w.enc_v_w, h, kVertexInputDim, "enc_v.W")) return e;
  if (auto e = check(w.enc_v_b, h, 1, "enc_v.b")) return e;
  if (auto e = check(w.enc_e_w, h, kEdgeInputDim, "enc_e.W")) return e;
  if (auto e = check(w.enc_e_b, h, 1, "enc_e.b")) return e;
  for (std::size_t k = 0; k < w.layers.size(); ++k) {
    const std::string base = "mp" + std::to_string(k + 1);
    if (auto e = check(w.layers[k].msg_w, h, 2 * h, base + ".msg.W")) return e;
    if (auto e = check(w.layers[k].msg_b, h, 1, base + ".msg.b")) return e;
    if (auto e = check(w.layers[k].upd_w, h, 2 * h, base + ".upd.W")) return e;
    if (auto e = check(w.layers[k].upd_b, h, 1, base + ".upd.b")) return e;
  }
  if (auto e = check(w.dec_w, 1, h, "dec.W")) return e;
  if (auto e = check(w.dec_b, 1, 1, "dec.b")) return e;
  return std::nullopt;
}

JointAction gnn_forward(const PolicyWeights& w, const ObservationGraph& obs) {
  const std::size_t n = obs.vertices.size();
  JointAction action;
  action.accel.resize(n);
  if (n == 0) return action;

  std::vector<std::vector<double>> h(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = vertex_input(obs.vertices[i]);
    h[i] = matvec(w.enc_v_w, w.enc_v_b, {x.begin(), x.end()});
    relu_inplace(h[i]);
  }

  // Each undirected edge acts in both directions with role-swapped features.
  struct DirectedEdge {
    std::size_t from, to;
    std::vector<double> enc;
  };
  std::vector<DirectedEdge> dir;
  dir.reserve(2 * obs.edges.size());
  for (const auto& e : obs.edges) {
    const int si = obs.vertex_index(e.source);
    const int ti = obs.vertex_index(e.target);
    const auto fwd = edge_input(e.features, false);
    const auto rev = edge_input(e.features, true);
    std::vector<double> enc_fwd = matvec(w.enc_e_w, w.enc_e_b, {fwd.begin(), fwd.end()});
    std::vector<double> enc_rev = matvec(w.enc_e_w, w.enc_e_b, {rev.begin(), rev.end()});
    relu_inplace(enc_fwd);
    relu_inplace(enc_rev);
    // Forward direction: source -> target sees the forward features.
    dir.push_back({static_cast<std::size_t>(si), static_cast<std::size_t>(ti),
                   std::move(enc_fwd)});
    dir.push_back({static_cast<std::size_t>(ti), static_cast<std::size_t>(si),
                   std::move(enc_rev)});
  }

  for (const auto& layer : w.layers) {
    std::vector<std::vector<double>> agg(n, std::vector<double>(w.hidden, 0.0));
    for (const auto& d : dir) {
      std::vector<double> m = matvec(layer.msg_w, layer.msg_b, concat(h[d.from], d.enc));
      relu_inplace(m);
      for (int k = 0; k < w.hidden; ++k) agg[d.to][k] += m[k];
    }
    std::vector<std::vector<double>> next(n);
    for (std::size_t i = 0; i < n; ++i) {
      next[i] = matvec(layer.upd_w, layer.upd_b, concat(h[i], agg[i]));
      relu_inplace(next[i]);
    }
    h = std::move(next);
  }

  for (std::size_t i = 0; i < n; ++i) {
    const double y = matvec(w.dec_w, w.dec_b, h[i])[0];
    action.accel[i] = kActionLimit * std::tanh(y);
  }
  return action;
}

GnnPolicy::GnnPolicy(PolicyWeights weights) : weights_(std::move(weights)) {
  if (auto problem = validate_weights(weights_)) {
    throw std::invalid_argument("invalid policy weights: " + *problem);
  }
}

JointAction GnnPolicy::select_action(const ObservationGraph& obs) const {
  return gnn_forward(weights_, obs);
}

namespace {

Tensor read_tensor(detail::LineScanner& scan, const std::string& name, std::size_t rows,
                   std::size_t cols, std::size_t at) {
  Tensor t;
  t.rows = rows;
  t.cols = cols;
  t.data.reserve(rows * cols);
  std::string line;
  std::size_t off = at;
  for (std::size_t r = 0; r < rows; ++r) {
    if (!scan.next(line, off)) {
      throw ParseError(name, off, "unexpected end of tensor data");
    }
    const auto toks = detail::split_ws(line);
    if (toks.size() != cols) {
      throw ParseError(name, off,
                       "expected " + std::to_string(cols) + " values per row, got " +
                           std::to_string(toks.size()));
    }
    for (const auto& tok : toks) {
      t.data.push_back(detail::parse_double(tok, name, off));
    }
  }
  return t;
}

}  // namespace

PolicyWeights load_weights(std::istream& in) {
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  detail::LineScanner scan(std::move(data));
  std::string line;
  std::size_t at = 0;

  if (!scan.next(line, at) || line != "gnn_weights_v1") {
    throw ParseError("magic", at, "expected 'gnn_weights_v1'");
  }
  if (!scan.next(line, at)) throw ParseError("hidden", at, "missing hidden dimension");
  auto toks = detail::split_ws(line);
  if (toks.size() != 2 || toks[0] != "hidden") {
    throw ParseError("hidden", at, "expected 'hidden <n>'");
  }
  PolicyWeights w;
  w.hidden = static_cast<int>(detail::parse_int(toks[1], "hidden", at));
  if (w.hidden <= 0 || w.hidden > 4096) {
    throw ParseError("hidden", at, "hidden dimension out of range");
  }

  std::map<std::string, Tensor> tensors;
  while (scan.next(line, at)) {
    toks = detail::split_ws(line);
    if (toks[0] == "end") break;
    if (toks.size() != 4 || toks[0] != "tensor") {
      throw ParseError("tensor", at, "expected 'tensor <name> <rows> <cols>'");
    }
    const std::string name = toks[1];
    const auto rows = detail::parse_int(toks[2], name, at);
    const auto cols = detail::parse_int(toks[3], name, at);
    if (rows <= 0 || cols <= 0 || rows * cols > (1 << 24)) {
      throw ParseError(name, at, "tensor shape out of range");
    }
    tensors[name] = read_tensor(scan, name, static_cast<std::size_t>(rows),
                                static_cast<std::size_t>(cols), at);
  }

  auto take = [&](const std::string& name) -> Tensor {
    const auto it = tensors.find(name);
    if (it == tensors.end()) {
      throw std::invalid_argument("weights file is missing tensor '" + name + "'");
    }
    return it->second;
  };
  w.enc_v_w = take("enc_v.W");
  w.enc_v_b = take("enc_v.b");
  w.enc_e_w = take("enc_e.W");
  w.enc_e_b = take("enc_e.b");
  for (std::size_t k = 0; k < w.layers.size(); ++k) {
    const std::string base = "mp" + std::to_string(k + 1);
    w.layers[k].msg_w = take(base + ".msg.W");
    w.layers[k].msg_b = take(base + ".msg.b");
    w.layers[k].upd_w = take(base + ".upd.W");
    w.layers[k].upd_b = take(base + ".upd.b");
  }
  w.dec_w = take("dec.W");
  w.dec_b = take("dec.b");

  if (auto problem = validate_weights(w)) {
    throw std::invalid_argument("invalid policy weights: " + *problem);
  }
  return w;
}

PolicyWeights load_weights_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open weights file '" + path + "'");
  return load_weights(in);
}

void save_weights(const PolicyWeights& w, std::ostream& out) {
  out << "gnn_weights_v1\n";
  out << "hidden " << w.hidden << "\n";
  auto write = [&out](const std::string& name, const Tensor& t) {
    out << "tensor " << name << " " << t.rows << " " << t.cols << "\n";
    for (std::size_t r = 0; r < t.rows; ++r) {
      for (std::size_t c = 0; c < t.cols; ++c) {
        if (c) out << " ";
        out << format_double(t.at(r, c));
      }
      out << "\n";
    }
  };
  write("enc_v.W", w.enc_v_w);
  write("enc_v.b", w.enc_v_b);
  write("enc_e.W", w.enc_e_w);
  write("enc_e.b", w.enc_e_b);
  for (std::size_t k = 0; k < w.layers.size(); ++k) {
    const std::string base = "mp" + std::to_string(k + 1);
    write(base + ".msg.W", w.layers[k].msg_w);
    write(base + ".msg.b", w.layers[k].msg_b);
    write(base + ".upd.W", w.layers[k].upd_w);
    write(base + ".upd.b", w.layers[k].upd_b);
  }
  write("dec.W", w.dec_w);
  write("dec.b", w.dec_b);
  out << "end\n";
}

std::unique_ptr<Policy> make_policy(const std::string& selector) {
  if (selector == "heuristic") {
    return std::make_unique<HeuristicPolicy>();
  }
  if (selector.rfind("gnn:", 0) == 0) {
    return std::make_unique<GnnPolicy>(load_weights_file(selector.substr(4)));
  }
  throw std::invalid_argument("unknown policy '" + selector +
                              "' (expected 'heuristic' or 'gnn:<weights-path>')");
}

}  // namespace aim
