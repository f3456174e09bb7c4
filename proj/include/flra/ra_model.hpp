#pragma once

#include <cmath>
#include <vector>

#include "flra/numeric.hpp"
#include "flra/params.hpp"

namespace flra {

// Random-access analytics under the infinite-population Poisson model. The
// RA band is B while FL devices compute or idle, and (1-rho)B while they
// upload. Packet times become +inf when the RA band is zero; every term
// carrying such a time is evaluated as its limit (0 in success probability
// and throughput).

inline double ra_packet_time(const SystemParams& p, double b) {
  if (p.s_ra == 0.0) return 0.0;
  if (b <= 0.0) return kInf;
  return p.s_ra / shannon_rate(b, p.gain_ra, p.p_tx_ra, p.n0);
}

/// Packet times and phase weights for one (rho, T_tx^FL) operating point.
struct RaPhases {
  double t_full = 0.0;    // packet time while the whole band is free
  double t_shared = 0.0;  // packet time during the FL upload
  double w_full = 1.0;    // fraction of the round with the whole band
  double w_shared = 0.0;  // fraction of the round with (1-rho)B

  double t_avg() const {
    if (w_shared == 0.0) return t_full;
    if (w_full == 0.0) return t_shared;
    return w_full * t_full + w_shared * t_shared;
  }
};

inline RaPhases ra_phases(const SystemParams& p, BandwidthShare rho, double t_tx_fl) {
  RaPhases ph;
  ph.t_full = ra_packet_time(p, p.bandwidth);
  ph.t_shared = ra_packet_time(p, rho.complement() * p.bandwidth);
  ph.w_shared = t_tx_fl / p.t_round;
  ph.w_full = (p.t_round - t_tx_fl) / p.t_round;
  return ph;
}

inline double ra_packet_time_avg(const SystemParams& p, BandwidthShare rho, double t_tx_fl) {
  return ra_phases(p, rho, t_tx_fl).t_avg();
}

namespace detail {

// weight * exp(-k * lambda * t), with an infinite time or zero weight giving 0.
inline double survival(double weight, double k, double lambda, double t) {
  if (weight == 0.0 || std::isinf(t)) return 0.0;
  return weight * std::exp(-k * lambda * t);
}

// weight * lambda * t * exp(-k * lambda * t), limit 0 at t = inf or lambda = 0.
inline double carried_load(double weight, double k, double lambda, double t) {
  if (weight == 0.0 || lambda == 0.0 || std::isinf(t)) return 0.0;
  return weight * lambda * t * std::exp(-k * lambda * t);
}

}  // namespace detail

inline double success_prob(Protocol proto, const RaPhases& ph, double lambda) {
  if (lambda == 0.0) return 1.0;
  if (proto == Protocol::Aloha) {
    // Vulnerable window of two packet times in each phase.
    return detail::survival(ph.w_full, 2.0, lambda, ph.t_full) +
           detail::survival(ph.w_shared, 2.0, lambda, ph.t_shared);
  }
  // Slots sized for the worst case (shared-phase) packet.
  return detail::survival(1.0, 1.0, lambda, ph.t_shared);
}

inline double throughput(Protocol proto, const RaPhases& ph, double lambda) {
  if (proto == Protocol::Aloha) {
    return detail::carried_load(ph.w_full, 2.0, lambda, ph.t_full) +
           detail::carried_load(ph.w_shared, 2.0, lambda, ph.t_shared);
  }
  if (lambda == 0.0 || std::isinf(ph.t_shared)) return 0.0;
  return lambda * ph.t_avg() * std::exp(-lambda * ph.t_shared);
}

/// Expected energy per delivered packet, retransmissions included.
inline double energy_per_packet(Protocol proto, const SystemParams& p, const RaPhases& ph,
                                double lambda) {
  const double ps = success_prob(proto, ph, lambda);
  const double t = ph.t_avg();
  if (ps <= 0.0 || std::isinf(t)) return kInf;
  return p.p_tx_ra * t / ps;
}

inline double success_prob(Protocol proto, const SystemParams& p, double lambda,
                           BandwidthShare rho, double t_tx_fl) {
  return success_prob(proto, ra_phases(p, rho, t_tx_fl), lambda);
}

inline double throughput(Protocol proto, const SystemParams& p, double lambda,
                         BandwidthShare rho, double t_tx_fl) {
  return throughput(proto, ra_phases(p, rho, t_tx_fl), lambda);
}

inline double energy_per_packet(Protocol proto, const SystemParams& p, double lambda,
                                BandwidthShare rho, double t_tx_fl) {
  return energy_per_packet(proto, p, ra_phases(p, rho, t_tx_fl), lambda);
}

/// Evaluated RA state at one (lambda, rho).
struct RaPoint {
  double lambda_total = 0.0;
  BandwidthShare rho;
  double t_pkt_full = 0.0;
  double t_pkt_shared = 0.0;
  double t_pkt_avg = 0.0;
  double p_success = 1.0;
  double throughput = 0.0;
  double energy_per_packet = 0.0;

  double retx_rate(const SystemParams& p) const { return lambda_total - p.lambda_fresh; }
};

inline RaPoint evaluate_ra(Protocol proto, const SystemParams& p, double lambda,
                           BandwidthShare rho, double t_tx_fl) {
  const RaPhases ph = ra_phases(p, rho, t_tx_fl);
  RaPoint pt;
  pt.lambda_total = lambda;
  pt.rho = rho;
  pt.t_pkt_full = ph.t_full;
  pt.t_pkt_shared = ph.t_shared;
  pt.t_pkt_avg = ph.t_avg();
  pt.p_success = success_prob(proto, ph, lambda);
  pt.throughput = throughput(proto, ph, lambda);
  pt.energy_per_packet = energy_per_packet(proto, p, ph, lambda);
  return pt;
}

struct ThroughputPeak {
  double lambda_peak = 0.0;
  double q_max = 0.0;
};

namespace detail {

// Log-spaced attempt rates covering every phase's peak. The pure-ALOHA mix
// can be bimodal (one hump per phase), so the scan brackets the global peak
// before any local refinement.
inline std::vector<double> lambda_scan_grid(const RaPhases& ph, std::size_t points = 512) {
  const double t_hi = std::isinf(ph.t_shared) ? ph.t_full : std::max(ph.t_full, ph.t_shared);
  const double lo = 1e-3 / t_hi;
  const double hi = 10.0 / ph.t_full;
  std::vector<double> grid(points);
  const double ratio = std::log(hi / lo) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) grid[i] = lo * std::exp(ratio * static_cast<double>(i));
  grid.back() = hi;
  return grid;
}

}  // namespace detail

/// Global maximum of the normalized throughput over lambda in (0, 10/t_full].
inline ThroughputPeak max_throughput(Protocol proto, const RaPhases& ph) {
  if (ph.t_full <= 0.0 || std::isinf(ph.t_full)) return {};
  const auto grid = detail::lambda_scan_grid(ph);
  std::size_t best = 0;
  double best_q = -1.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double q = throughput(proto, ph, grid[i]);
    if (q > best_q) {
      best_q = q;
      best = i;
    }
  }
  const double lo = best == 0 ? 0.0 : grid[best - 1];
  const double hi = best + 1 == grid.size() ? grid[best] : grid[best + 1];
  const auto peak = numeric::golden_maximize(
      [&](double l) { return throughput(proto, ph, l); }, lo, hi, 1e-9);
  if (peak.fx >= best_q) return {peak.x, peak.fx};
  return {grid[best], best_q};
}

inline ThroughputPeak max_throughput(Protocol proto, const SystemParams& p, BandwidthShare rho,
                                     double t_tx_fl) {
  return max_throughput(proto, ra_phases(p, rho, t_tx_fl));
}

}  // namespace flra
