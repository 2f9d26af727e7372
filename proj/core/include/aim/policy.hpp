#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "aim/longitudinal.hpp"
#include "aim/scenegraph.hpp"

namespace aim {

/// Commanded longitudinal acceleration range of the behavior policy.
inline constexpr double kActionLimit = 3.0;  // m/s^2

/// One acceleration command per vehicle, ordered like the observation's
/// vertex list (ascending vehicle id). Components lie in [-3, 3] m/s^2.
struct JointAction {
  std::vector<double> accel;
};

class Policy {
 public:
  virtual ~Policy() = default;
  virtual JointAction select_action(const ObservationGraph& obs) const = 0;
};

struct HeuristicParams {
  double k_speed_track = 0.5;  // 1/s, proportional speed-limit tracking gain
  double headway = 1.5;        // s, gap after a reservation holder's exit
  double clear_length = 6.5;   // m past the conflict until it counts as free
  double enter_margin = 3.0;   // m before the conflict where entry begins
  double stop_margin = 2.0;    // m short of the conflict for full stops
  double vehicle_length = 5.0;
  TimeGapParams follow;
};

/// Deterministic reservation policy: vehicles claim conflict points in
/// predicted-arrival order (priority holders first), yielding vehicles brake
/// with the minimal constant deceleration that delays their entry until the
/// holder's exit plus the headway, and everyone else tracks the lane speed
/// limit proportionally.
class HeuristicPolicy : public Policy {
 public:
  HeuristicPolicy() = default;
  explicit HeuristicPolicy(HeuristicParams params) : params_(params) {}

  JointAction select_action(const ObservationGraph& obs) const override;
  const HeuristicParams& params() const { return params_; }

 private:
  HeuristicParams params_;
};

/// Reference entry point used by the unit tests.
JointAction heuristic_reservation_policy(const ObservationGraph& obs,
                                         const HeuristicParams& params = {});

/// Row-major matrix of network parameters.
struct Tensor {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
};

/// Parameters of the graph network: feature encoders, three message-passing
/// blocks, and the scalar action decoder.
struct PolicyWeights {
  int hidden = 32;
  Tensor enc_v_w, enc_v_b;
  Tensor enc_e_w, enc_e_b;
  struct MessagePassing {
    Tensor msg_w, msg_b;
    Tensor upd_w, upd_b;
  };
  std::array<MessagePassing, 3> layers;
  Tensor dec_w, dec_b;
};

/// Validates that all tensor shapes chain together; returns the first
/// problem or nullopt.
std::optional<std::string> validate_weights(const PolicyWeights& w);

/// Weights file round trip (named tensor sections with shape headers).
/// Throws ParseError on malformed input and std::invalid_argument when the
/// declared dimensions do not chain.
PolicyWeights load_weights(std::istream& in);
PolicyWeights load_weights_file(const std::string& path);
void save_weights(const PolicyWeights& w, std::ostream& out);

/// Forward pass: encoders, three rounds of edge-conditioned sum-aggregation
/// message passing, and a tanh-squashed per-vertex acceleration decoder.
JointAction gnn_forward(const PolicyWeights& w, const ObservationGraph& obs);

class GnnPolicy : public Policy {
 public:
  explicit GnnPolicy(PolicyWeights weights);

  JointAction select_action(const ObservationGraph& obs) const override;
  const PolicyWeights& weights() const { return weights_; }

 private:
  PolicyWeights weights_;
};

/// Constructs the policy named on the command line: "heuristic" or
/// "gnn:<weights-path>".
std::unique_ptr<Policy> make_policy(const std::string& selector);

}  // namespace aim
