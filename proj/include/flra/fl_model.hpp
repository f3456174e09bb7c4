#pragma once

#include <optional>
#include <stdexcept>

#include "flra/params.hpp"

namespace flra {

// FDMA uplink of the FL population. Each device gets rho*B/N Hz during the
// transmission phase at the end of the round.

inline double fl_device_rate(const SystemParams& p, BandwidthShare rho, std::size_t device) {
  if (device >= p.gains_fl.size()) throw std::out_of_range("FL device index out of range");
  if (p.n_fl == 0) return 0.0;
  const double b = rho.value() * p.bandwidth / static_cast<double>(p.n_fl);
  return shannon_rate(b, p.gains_fl[device], p.p_tx_fl, p.n0);
}

/// Round upload time, set by the weakest device. +inf at rho = 0.
inline double fl_tx_time(const SystemParams& p, BandwidthShare rho) {
  if (p.s_fl == 0.0 || p.gains_fl.empty()) return 0.0;
  if (rho.value() <= 0.0) return kInf;
  const double b = rho.value() * p.bandwidth / static_cast<double>(p.n_fl);
  return p.s_fl / shannon_rate(b, p.min_gain_fl(), p.p_tx_fl, p.n0);
}

inline double fl_device_energy(const SystemParams& p, BandwidthShare rho, std::size_t device) {
  if (device >= p.gains_fl.size()) throw std::out_of_range("FL device index out of range");
  if (p.s_fl == 0.0) return 0.0;
  const double rate = fl_device_rate(p, rho, device);
  if (rate <= 0.0) return kInf;
  return p.p_tx_fl * p.s_fl / rate;
}

inline double fl_total_energy(const SystemParams& p, BandwidthShare rho) {
  double total = 0.0;
  for (std::size_t n = 0; n < p.gains_fl.size(); ++n) total += fl_device_energy(p, rho, n);
  return total;
}

inline bool fl_latency_feasible(const SystemParams& p, BandwidthShare rho) {
  return fl_tx_time(p, rho) <= p.latency_budget();
}

/// Phase layout of one FL round: computation [t0,t1), idle [t1,t2),
/// upload [t2,t3). The round starts at t0 = 0.
struct FlRound {
  double t_cpu = 0.0;
  double t_idle = 0.0;
  double t_tx = 0.0;
  double t_round = 0.0;
  double t0 = 0.0, t1 = 0.0, t2 = 0.0, t3 = 0.0;

  // Fraction of the round during which RA devices see the reduced band.
  double shared_fraction() const { return t_tx / t_round; }
};

/// Empty when the upload does not fit the latency budget.
inline std::optional<FlRound> make_round(const SystemParams& p, BandwidthShare rho) {
  if (!fl_latency_feasible(p, rho)) return std::nullopt;
  FlRound r;
  r.t_cpu = p.t_cpu;
  r.t_tx = fl_tx_time(p, rho);
  r.t_round = p.t_round;
  r.t_idle = p.t_round - p.t_cpu - r.t_tx;
  r.t0 = 0.0;
  r.t1 = r.t_cpu;
  r.t2 = r.t_round - r.t_tx;
  r.t3 = r.t_round;
  return r;
}

/// Smallest feasible bandwidth share, by bisection on the monotone latency
/// test. The returned value is always on the feasible side. Empty if even
/// rho = 1 misses the budget.
inline std::optional<double> rho_min(const SystemParams& p, double tol = 1e-9) {
  if (!fl_latency_feasible(p, BandwidthShare(1.0))) return std::nullopt;
  if (fl_latency_feasible(p, BandwidthShare(0.0))) return 0.0;
  double lo = 0.0, hi = 1.0;  // lo infeasible, hi feasible
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (fl_latency_feasible(p, BandwidthShare(mid)))
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

}  // namespace flra
