#pragma once

#include <cmath>
#include <optional>
#include <string_view>
#include <vector>

#include "flra/fl_model.hpp"
#include "flra/numeric.hpp"
#include "flra/params.hpp"
#include "flra/ra_model.hpp"

namespace flra {

// Joint energy minimization over the bandwidth share rho and the total RA
// attempt rate lambda. For fixed rho the optimal lambda is the smallest rate
// meeting the throughput floor q, raised to lambda' + eps when the
// retransmission floor is higher; rho is then chosen by grid search.

enum class Binding { None, ThroughputRoot, RetransmissionFloor };

inline std::string_view to_string(Binding b) {
  switch (b) {
    case Binding::ThroughputRoot: return "throughput-root";
    case Binding::RetransmissionFloor: return "retransmission-floor";
    default: return "none";
  }
}

enum class Infeasibility { None, Latency, Throughput };

inline std::string_view to_string(Infeasibility i) {
  switch (i) {
    case Infeasibility::Latency: return "latency";
    case Infeasibility::Throughput: return "throughput";
    default: return "none";
  }
}

struct LambdaStar {
  double lambda = 0.0;
  Binding binding = Binding::None;
};

struct Solution {
  Protocol protocol = Protocol::Aloha;
  BandwidthShare rho_star;
  double lambda_star = 0.0;
  double t_tx_fl = 0.0;
  double t_pkt_avg = 0.0;
  double e_fl_total = 0.0;
  double e_ra_total = 0.0;
  double e_total = 0.0;
  double e_bit_fl = 0.0;
  double e_bit_ra = 0.0;
  double e_ra_packet = 0.0;
  double p_success = 0.0;
  double q_achieved = 0.0;
  bool feasible = false;
  Binding binding = Binding::None;
  Infeasibility infeasibility = Infeasibility::None;
};

/// Smallest lambda with throughput == q (ascending branch). Empty when q is
/// above the peak throughput at this operating point.
inline std::optional<double> lambda_min(Protocol proto, const SystemParams& p, const RaPhases& ph) {
  if (p.q_min <= 0.0) return 0.0;
  const ThroughputPeak peak = max_throughput(proto, ph);
  if (peak.q_max < p.q_min) return std::nullopt;
  auto excess = [&](double l) { return throughput(proto, ph, l) - p.q_min; };

  // First scan point reaching q; the ascending root lies just before it.
  double lo = 0.0, hi = peak.lambda_peak;
  for (double l : detail::lambda_scan_grid(ph)) {
    if (l >= peak.lambda_peak) break;
    if (excess(l) >= 0.0) {
      hi = l;
      break;
    }
    lo = l;
  }
  if (excess(hi) < 0.0) hi = peak.lambda_peak;
  return numeric::bisect(excess, lo, hi, 1e-13);
}

inline std::optional<double> lambda_min(Protocol proto, const SystemParams& p, BandwidthShare rho,
                                        double t_tx_fl) {
  return lambda_min(proto, p, ra_phases(p, rho, t_tx_fl));
}

inline std::optional<LambdaStar> lambda_star(Protocol proto, const SystemParams& p,
                                             const RaPhases& ph) {
  const auto root = lambda_min(proto, p, ph);
  if (!root) return std::nullopt;
  const double floor = p.lambda_fresh + p.eps_retx;
  if (*root >= floor) return LambdaStar{*root, Binding::ThroughputRoot};
  return LambdaStar{floor, Binding::RetransmissionFloor};
}

inline std::optional<LambdaStar> lambda_star(Protocol proto, const SystemParams& p,
                                             BandwidthShare rho, double t_tx_fl) {
  return lambda_star(proto, p, ra_phases(p, rho, t_tx_fl));
}

/// Full objective at one bandwidth share, with lambda set to lambda*(rho).
inline Solution objective_energy(Protocol proto, const SystemParams& p, BandwidthShare rho) {
  Solution s;
  s.protocol = proto;
  s.rho_star = rho;
  s.t_tx_fl = fl_tx_time(p, rho);
  s.e_fl_total = fl_total_energy(p, rho);
  if (!fl_latency_feasible(p, rho)) {
    s.infeasibility = Infeasibility::Latency;
    s.e_total = kInf;
    return s;
  }
  const RaPhases ph = ra_phases(p, rho, s.t_tx_fl);
  s.t_pkt_avg = ph.t_avg();
  const auto ls = lambda_star(proto, p, ph);
  if (!ls) {
    s.infeasibility = Infeasibility::Throughput;
    s.e_total = kInf;
    return s;
  }
  s.lambda_star = ls->lambda;
  s.binding = ls->binding;
  s.p_success = success_prob(proto, ph, s.lambda_star);
  s.q_achieved = throughput(proto, ph, s.lambda_star);
  s.e_ra_packet = energy_per_packet(proto, p, ph, s.lambda_star);
  s.e_ra_total = p.fresh_packets_per_round() * s.e_ra_packet;
  if (p.lambda_fresh == 0.0) s.e_ra_total = 0.0;
  s.e_total = s.e_fl_total + s.e_ra_total;
  const double fl_bits = static_cast<double>(p.n_fl) * p.s_fl;
  const double ra_bits = p.fresh_packets_per_round() * p.s_ra;
  s.e_bit_fl = fl_bits > 0.0 ? s.e_fl_total / fl_bits : 0.0;
  s.e_bit_ra = ra_bits > 0.0 ? s.e_ra_total / ra_bits : 0.0;
  s.feasible = std::isfinite(s.e_total);
  if (!s.feasible) s.infeasibility = Infeasibility::Throughput;
  return s;
}

struct SolveOptions {
  double grid_step = 1e-3;
  // Golden-section pass within one grid step of the grid winner.
  bool refine = true;
};

/// Grid search over the feasible shares {rho_min, rho_min + step, ..., 1}.
/// Ties go to the smaller rho. An infeasible result carries the first
/// violated constraint.
inline Solution solve(Protocol proto, const SystemParams& p, const SolveOptions& opt = {}) {
  if (!(opt.grid_step > 0.0 && opt.grid_step <= 0.1))
    throw std::invalid_argument("grid_step must lie in (0, 0.1]");
  const auto lo = rho_min(p);
  if (!lo) {
    Solution s;
    s.protocol = proto;
    s.rho_star = BandwidthShare(1.0);
    s.t_tx_fl = fl_tx_time(p, BandwidthShare(1.0));
    s.e_total = kInf;
    s.infeasibility = Infeasibility::Latency;
    return s;
  }

  std::vector<double> grid;
  for (double rho = *lo; rho < 1.0 - 1e-12; rho = *lo + static_cast<double>(grid.size()) * opt.grid_step)
    grid.push_back(rho);
  grid.push_back(1.0);

  std::optional<Solution> best;
  for (double rho : grid) {
    Solution s = objective_energy(proto, p, BandwidthShare(rho));
    if (s.feasible && (!best || s.e_total < best->e_total)) best = s;
  }
  if (!best) {
    Solution s = objective_energy(proto, p, BandwidthShare(*lo));
    s.feasible = false;
    s.infeasibility = Infeasibility::Throughput;
    return s;
  }
  if (opt.refine) {
    const double a = std::max(*lo, best->rho_star.value() - opt.grid_step);
    const double b = std::min(1.0, best->rho_star.value() + opt.grid_step);
    const auto r = numeric::golden_minimize(
        [&](double rho) { return objective_energy(proto, p, BandwidthShare(rho)).e_total; }, a, b,
        0.0, 1e-9);
    Solution s = objective_energy(proto, p, BandwidthShare(r.x));
    if (s.feasible && s.e_total < best->e_total) best = s;
  }
  return *best;
}

/// Relative energy advantage of the winner: loser / winner - 1.
inline double winning_margin(const Solution& a, const Solution& b) {
  const double lo = std::min(a.e_total, b.e_total);
  const double hi = std::max(a.e_total, b.e_total);
  return hi / lo - 1.0;
}

struct SweepPoint {
  double x = 0.0;
  Solution solution;
};

inline std::vector<SweepPoint> sweep_fl_devices(const SystemParams& p, Protocol proto,
                                                const std::vector<std::size_t>& n_values,
                                                const SolveOptions& opt = {}) {
  std::vector<SweepPoint> out;
  out.reserve(n_values.size());
  for (std::size_t n : n_values)
    out.push_back({static_cast<double>(n), solve(proto, with_fl_devices(p, n), opt)});
  return out;
}

inline std::vector<SweepPoint> sweep_arrivals(const SystemParams& p, Protocol proto,
                                              const std::vector<double>& lambda_values,
                                              const SolveOptions& opt = {}) {
  std::vector<SweepPoint> out;
  out.reserve(lambda_values.size());
  for (double l : lambda_values) {
    SystemParams q = p;
    q.lambda_fresh = l;
    out.push_back({l, solve(proto, q, opt)});
  }
  return out;
}

/// Per-share landscape: peak throughput and energy components at lambda*(rho).
struct RhoPoint {
  double rho = 0.0;
  bool latency_feasible = false;
  bool throughput_feasible = false;
  double t_tx_fl = kInf;
  double lambda_peak = 0.0;
  double q_max = 0.0;
  double lambda_star = std::nan("");
  double e_fl_device = kInf;   // one model upload
  double e_fl_total = kInf;
  double e_ra_packet = std::nan("");
  double e_total = std::nan("");
};

inline RhoPoint evaluate_rho(const SystemParams& p, Protocol proto, BandwidthShare rho) {
  RhoPoint r;
  r.rho = rho.value();
  r.t_tx_fl = fl_tx_time(p, rho);
  r.latency_feasible = fl_latency_feasible(p, rho);
  r.e_fl_device = p.gains_fl.empty() ? 0.0 : fl_device_energy(p, rho, 0);
  r.e_fl_total = fl_total_energy(p, rho);
  // The throughput landscape is only defined while the upload fits the round.
  if (!(r.t_tx_fl <= p.t_round)) return r;
  const RaPhases ph = ra_phases(p, rho, r.t_tx_fl);
  const ThroughputPeak peak = max_throughput(proto, ph);
  r.lambda_peak = peak.lambda_peak;
  r.q_max = peak.q_max;
  if (const auto ls = lambda_star(proto, p, ph)) {
    r.throughput_feasible = true;
    r.lambda_star = ls->lambda;
    r.e_ra_packet = energy_per_packet(proto, p, ph, ls->lambda);
    r.e_total = r.e_fl_total + p.fresh_packets_per_round() * r.e_ra_packet;
  }
  return r;
}

inline std::vector<RhoPoint> sweep_rho(const SystemParams& p, Protocol proto,
                                       const std::vector<double>& rho_values) {
  std::vector<RhoPoint> out;
  out.reserve(rho_values.size());
  for (double rho : rho_values) out.push_back(evaluate_rho(p, proto, BandwidthShare(rho)));
  return out;
}

}  // namespace flra
