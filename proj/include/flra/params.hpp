#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace flra {

// All quantities are SI base units: bits, seconds, Hz, watts, joules.
inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Protocol { Aloha, SlottedAloha };

inline std::string_view to_string(Protocol p) {
  return p == Protocol::Aloha ? "aloha" : "saloha";
}

inline std::string_view short_name(Protocol p) {
  return p == Protocol::Aloha ? "A" : "SA";
}

inline Protocol protocol_from_string(std::string_view s) {
  if (s == "aloha" || s == "A") return Protocol::Aloha;
  if (s == "saloha" || s == "SA" || s == "s-aloha") return Protocol::SlottedAloha;
  throw std::invalid_argument("unknown protocol '" + std::string(s) + "'");
}

inline constexpr Protocol kProtocols[] = {Protocol::Aloha, Protocol::SlottedAloha};

/// Fraction of the band reserved for FL uploads, clamped to [0, 1] on construction.
class BandwidthShare {
 public:
  constexpr BandwidthShare() = default;
  explicit BandwidthShare(double rho) : rho_(rho) {
    if (!(rho >= 0.0 && rho <= 1.0))
      throw std::invalid_argument("bandwidth share must lie in [0, 1]");
  }
  constexpr double value() const { return rho_; }
  constexpr double complement() const { return 1.0 - rho_; }
  friend constexpr bool operator==(BandwidthShare, BandwidthShare) = default;

 private:
  double rho_ = 0.0;
};

struct SystemParams {
  std::size_t n_fl = 30;
  double lambda_fresh = 1e4;   // pkts/s
  double t_cpu = 38.0;         // s
  double t_round = 60.0;       // s
  double q_min = 0.178;
  double eps_retx = 1e2;       // pkts/s
  double bandwidth = 60e6;     // Hz
  double s_fl = 100e6;         // bits
  double s_ra = 1.5e3;         // bits
  std::vector<double> gains_fl = std::vector<double>(30, 0.1);
  double gain_ra = 0.1;
  double p_tx_fl = 0.4;        // W
  double p_tx_ra = 0.4;        // W
  double n0 = 1e-17;           // W/Hz

  double latency_budget() const { return t_round - t_cpu; }
  double min_gain_fl() const {
    return gains_fl.empty() ? 0.0 : *std::min_element(gains_fl.begin(), gains_fl.end());
  }
  // Number of fresh RA packets generated during one FL round.
  double fresh_packets_per_round() const { return lambda_fresh * t_round; }

  friend bool operator==(const SystemParams&, const SystemParams&) = default;
};

/// Reference parameter set.
inline SystemParams default_params() { return SystemParams{}; }

/// Resizes the FL population, replicating the existing gains cyclically.
inline SystemParams with_fl_devices(SystemParams p, std::size_t n) {
  std::vector<double> gains(n);
  for (std::size_t i = 0; i < n; ++i)
    gains[i] = p.gains_fl.empty() ? 0.1 : p.gains_fl[i % p.gains_fl.size()];
  p.n_fl = n;
  p.gains_fl = std::move(gains);
  return p;
}

/// Throws std::invalid_argument naming the first violated field.
inline void validate(const SystemParams& p) {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("invalid parameter: ") + what);
  };
  require(p.n_fl > 0, "n_fl must be positive");
  require(p.gains_fl.size() == p.n_fl, "gains_fl length must equal n_fl");
  for (double g : p.gains_fl) require(g > 0.0 && g <= 1.0, "gains_fl entries must lie in (0, 1]");
  require(p.lambda_fresh > 0.0, "lambda_fresh must be positive");
  require(p.t_cpu > 0.0, "t_cpu must be positive");
  require(p.t_round > p.t_cpu, "t_round must exceed t_cpu");
  require(p.q_min >= 0.0 && p.q_min < 1.0, "q_min must lie in [0, 1)");
  require(p.eps_retx > 0.0, "eps_retx must be positive");
  require(p.bandwidth > 0.0, "bandwidth must be positive");
  require(p.s_fl > 0.0, "s_fl must be positive");
  require(p.s_ra > 0.0, "s_ra must be positive");
  require(p.gain_ra > 0.0 && p.gain_ra <= 1.0, "gain_ra must lie in (0, 1]");
  require(p.p_tx_fl > 0.0, "p_tx_fl must be positive");
  require(p.p_tx_ra > 0.0, "p_tx_ra must be positive");
  require(p.n0 > 0.0, "n0 must be positive");
}

/// Shannon capacity b*log2(1 + g*P/(b*N0)) in bit/s. Zero bandwidth gives zero
/// rate, the continuous limit as b -> 0.
inline double shannon_rate(double b, double gain, double power, double n0) {
  if (b <= 0.0) return 0.0;
  return b * std::log1p(gain * power / (b * n0)) / std::numbers::ln2;
}

}  // namespace flra
