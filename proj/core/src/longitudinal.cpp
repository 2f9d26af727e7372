#include "aim/longitudinal.hpp"

#include <algorithm>
#include <cmath>

namespace aim {

double time_gap_accel(double gap, double v_ego, double v_lead, const TimeGapParams& p) {
  const double desired = p.standstill + p.headway * v_ego;
  double a = p.k_gap * (gap - desired) + p.k_speed * (v_lead - v_ego);
  if (v_ego > v_lead) {
    const double closing = std::max(gap - p.standstill, 0.1);
    const double a_req = -(v_ego * v_ego - v_lead * v_lead) / (2.0 * closing);
    if (a_req < -p.comfort_decel) a = std::min(a, a_req);
  }
  return a;
}

double yield_accel(double dist, double v, double t_req, double stop_margin) {
  if (t_req <= 0.0) return 0.0;
  if (dist <= 0.0) return 0.0;  // already at the conflict; clearing is better
  const double t_nat = dist / std::max(v, 1e-3);
  if (t_nat >= t_req) return 0.0;
  const double a_timed = 2.0 * (dist - v * t_req) / (t_req * t_req);
  if (v + a_timed * t_req >= 0.0) return std::min(a_timed, 0.0);
  // The timed profile would reverse; stop short of the conflict instead.
  const double d_stop = std::max(dist - stop_margin, 0.3);
  return -(v * v) / (2.0 * d_stop);
}

}  // namespace aim
