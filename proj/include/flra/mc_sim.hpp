#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <future>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "flra/fl_model.hpp"
#include "flra/params.hpp"
#include "flra/ra_model.hpp"

namespace flra::sim {

// Open-loop Monte Carlo check of the RA collision model. Attempts form a
// Poisson process of rate lambda over n_rounds FL rounds. A packet's
// duration is fixed by the phase at its start instant; FL uploads are
// orthogonal (FDMA) and never collide with RA packets.
//
// Random stream: std::mt19937_64 seeded with `seed`; interarrival gaps are
// -log(1 - u) / lambda with u = (x >> 11) * 2^-53. The stream is fully
// specified, so traces are reproducible across standard libraries.

enum class Phase : int { Full = 0, Shared = 1 };

struct SimConfig {
  SystemParams params;
  Protocol protocol = Protocol::Aloha;
  double lambda_total = 0.0;
  BandwidthShare rho;
  std::size_t n_rounds = 1;
  std::uint64_t seed = 1;
  // Upload duration per round; defaults to fl_tx_time(params, rho).
  std::optional<double> t_tx_fl;

  double upload_time() const { return t_tx_fl ? *t_tx_fl : fl_tx_time(params, rho); }
};

struct PhaseStats {
  std::uint64_t attempts = 0;
  std::uint64_t successes = 0;

  double p_hat() const {
    return attempts == 0 ? 1.0 : static_cast<double>(successes) / static_cast<double>(attempts);
  }
  double stderr_p() const {
    if (attempts == 0) return 0.0;
    const double p = p_hat();
    return std::sqrt(p * (1.0 - p) / static_cast<double>(attempts));
  }
};

struct SimStats {
  std::uint64_t attempts = 0;
  std::uint64_t successes = 0;
  double p_success_hat = 1.0;
  double throughput_hat = 0.0;
  double stderr_p = 0.0;
  double stderr_throughput = 0.0;
  std::array<PhaseStats, 2> phase{};  // indexed by Phase
  double sim_time = 0.0;
  bool no_attempts = true;

  std::uint64_t collided() const { return attempts - successes; }
  const PhaseStats& of(Phase p) const { return phase[static_cast<int>(p)]; }
};

struct TraceRecord {
  double arrival_time = 0.0;
  Phase phase = Phase::Full;
  double duration = 0.0;
  bool success = false;
};

using TraceSink = std::function<void(const TraceRecord&)>;

namespace detail {

class ArrivalStream {
 public:
  ArrivalStream(std::uint64_t seed, double rate) : rng_(seed), rate_(rate) {}
  double next_gap() {
    const double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
    return -std::log1p(-u) / rate_;
  }

 private:
  std::mt19937_64 rng_;
  double rate_;
};

struct Accumulator {
  SimStats stats;
  double carried = 0.0;     // successful airtime (ALOHA) or slot credit (S-ALOHA)
  double carried_sq = 0.0;

  void record(const TraceRecord& r, double credit, const TraceSink& sink) {
    ++stats.attempts;
    auto& ph = stats.phase[static_cast<int>(r.phase)];
    ++ph.attempts;
    if (r.success) {
      ++stats.successes;
      ++ph.successes;
      carried += credit;
      carried_sq += credit * credit;
    }
    if (sink) sink(r);
  }
};

inline void finish(SimStats& s) {
  s.no_attempts = s.attempts == 0;
  if (s.attempts > 0) {
    s.p_success_hat = static_cast<double>(s.successes) / static_cast<double>(s.attempts);
    s.stderr_p = std::sqrt(s.p_success_hat * (1.0 - s.p_success_hat) /
                           static_cast<double>(s.attempts));
  } else {
    s.p_success_hat = 1.0;
    s.stderr_p = 0.0;
  }
}

}  // namespace detail

inline void check(const SimConfig& c) {
  if (c.n_rounds < 1) throw std::invalid_argument("n_rounds must be at least 1");
  if (!(c.lambda_total >= 0.0)) throw std::invalid_argument("lambda_total must be >= 0");
  const double t_tx = c.upload_time();
  if (!(t_tx >= 0.0 && t_tx <= c.params.t_round))
    throw std::invalid_argument("FL upload does not fit in the round at this rho");
  if (t_tx > 0.0 && c.rho.value() >= 1.0)
    throw std::invalid_argument("rho = 1 leaves no band for RA devices during the upload");
}

inline SimStats simulate(const SimConfig& c, const TraceSink& sink = {}) {
  check(c);
  const SystemParams& p = c.params;
  const double round = p.t_round;
  const double horizon = round * static_cast<double>(c.n_rounds);
  const double t_tx = c.upload_time();
  const double upload_start = round - t_tx;  // t2 within each round
  const RaPhases ph = ra_phases(p, c.rho, t_tx);

  detail::Accumulator acc;
  acc.stats.sim_time = horizon;
  if (c.lambda_total == 0.0) {
    detail::finish(acc.stats);
    return acc.stats;
  }

  auto phase_at = [&](double t) {
    const double in_round = t - std::floor(t / round) * round;
    return (t_tx > 0.0 && in_round >= upload_start) ? Phase::Shared : Phase::Full;
  };

  detail::ArrivalStream arrivals(c.seed, c.lambda_total);

  if (c.protocol == Protocol::Aloha) {
    // Sweep in start order: a packet collides with an earlier one iff it
    // starts before the latest end seen so far, and with a later one iff
    // the next start falls before its own end.
    std::optional<TraceRecord> pending;
    bool pending_hit = false;
    double pending_end = 0.0;
    double latest_end = 0.0;  // over packets before `pending`
    for (double t = arrivals.next_gap(); t < horizon; t += arrivals.next_gap()) {
      TraceRecord cur;
      cur.arrival_time = t;
      cur.phase = phase_at(t);
      cur.duration = cur.phase == Phase::Full ? ph.t_full : ph.t_shared;
      bool cur_hit = t < latest_end;
      if (pending) {
        if (t < pending_end) {
          pending_hit = true;
          cur_hit = true;
        }
        pending->success = !pending_hit;
        acc.record(*pending, pending->duration, sink);
        latest_end = std::max(latest_end, pending_end);
      }
      pending = cur;
      pending_hit = cur_hit;
      pending_end = t + cur.duration;
    }
    if (pending) {
      pending->success = !pending_hit;
      acc.record(*pending, pending->duration, sink);
    }
    acc.stats.throughput_hat = acc.carried / horizon;
    acc.stats.stderr_throughput = std::sqrt(acc.carried_sq) / horizon;
  } else {
    // Slots sized for the shared-phase packet; an arrival waits for the
    // next slot boundary and succeeds iff it is alone in that slot.
    const double slot = ph.t_shared;
    const double slots = std::floor(horizon / slot);
    const double credit = ph.t_avg() / slot;
    std::vector<TraceRecord> group;
    std::int64_t group_slot = -1;
    auto flush = [&] {
      const bool alone = group.size() == 1;
      for (auto& r : group) {
        r.success = alone;
        acc.record(r, credit, sink);
      }
      group.clear();
    };
    for (double t = arrivals.next_gap(); t < horizon; t += arrivals.next_gap()) {
      const auto k = static_cast<std::int64_t>(std::floor(t / slot)) + 1;
      if (k != group_slot) {
        flush();
        group_slot = k;
      }
      group.push_back({t, phase_at(t), slot, false});
    }
    flush();
    acc.stats.throughput_hat = acc.carried / slots;
    acc.stats.stderr_throughput = std::sqrt(acc.carried_sq) / slots;
  }
  detail::finish(acc.stats);
  return acc.stats;
}

/// Pools independent replications (seed, seed+1, ...). Counts add, so the
/// result does not depend on completion order.
inline SimStats simulate_replicated(const SimConfig& c, std::size_t replications) {
  if (replications == 0) throw std::invalid_argument("replications must be positive");
  std::vector<std::future<SimStats>> jobs;
  for (std::size_t r = 0; r < replications; ++r) {
    SimConfig rc = c;
    rc.seed = c.seed + r;
    jobs.push_back(std::async(std::launch::async, [rc] { return simulate(rc); }));
  }
  SimStats total;
  double carried_var = 0.0;
  double weighted_q = 0.0;
  for (auto& j : jobs) {
    const SimStats s = j.get();
    total.attempts += s.attempts;
    total.successes += s.successes;
    for (int k = 0; k < 2; ++k) {
      total.phase[k].attempts += s.phase[k].attempts;
      total.phase[k].successes += s.phase[k].successes;
    }
    total.sim_time += s.sim_time;
    weighted_q += s.throughput_hat * s.sim_time;
    carried_var += std::pow(s.stderr_throughput * s.sim_time, 2);
  }
  total.throughput_hat = weighted_q / total.sim_time;
  total.stderr_throughput = std::sqrt(carried_var) / total.sim_time;
  detail::finish(total);
  return total;
}

/// Analytic counterparts of the simulated quantities.
struct AnalyticTargets {
  double p_success = 1.0;
  double throughput = 0.0;
  double p_full = 1.0;    // success factor for packets starting in [t0, t2)
  double p_shared = 1.0;  // success factor for packets starting in [t2, t3)
};

inline AnalyticTargets analytic_targets(const SimConfig& c) {
  const RaPhases ph = ra_phases(c.params, c.rho, c.upload_time());
  const double l = c.lambda_total;
  AnalyticTargets a;
  a.p_success = success_prob(c.protocol, ph, l);
  a.throughput = throughput(c.protocol, ph, l);
  if (c.protocol == Protocol::Aloha) {
    a.p_full = std::exp(-2.0 * l * ph.t_full);
    a.p_shared = std::exp(-2.0 * l * ph.t_shared);
  } else {
    a.p_full = a.p_shared = std::exp(-l * ph.t_shared);
  }
  return a;
}

struct Check {
  std::string quantity;
  double empirical = 0.0;
  double stderr_ = 0.0;
  double analytic = 0.0;
  double tolerance = 0.0;
  std::uint64_t samples = 0;
  bool vacuous = false;
  bool pass = false;
};

struct ValidationReport {
  SimStats stats;
  AnalyticTargets analytic;
  std::vector<Check> checks;
  bool passed = true;
};

/// Compares simulated estimates with analytic targets at
/// sigma * stderr + abs_slack. Quantities with no samples pass vacuously.
inline ValidationReport compare(const SimStats& s, const AnalyticTargets& a, double sigma,
                                double abs_slack = 0.01) {
  ValidationReport rep;
  rep.stats = s;
  rep.analytic = a;
  auto add = [&](std::string name, double emp, double se, double target, std::uint64_t n) {
    Check c{std::move(name), emp, se, target, sigma * se + abs_slack, n, n == 0, false};
    c.pass = c.vacuous || std::abs(emp - target) <= c.tolerance;
    rep.passed = rep.passed && c.pass;
    rep.checks.push_back(std::move(c));
  };
  add("p_success", s.p_success_hat, s.stderr_p, a.p_success, s.attempts);
  add("throughput", s.throughput_hat, s.stderr_throughput, a.throughput, s.attempts);
  const auto& full = s.of(Phase::Full);
  const auto& shared = s.of(Phase::Shared);
  add("p_success_full_phase", full.p_hat(), full.stderr_p(), a.p_full, full.attempts);
  add("p_success_shared_phase", shared.p_hat(), shared.stderr_p(), a.p_shared, shared.attempts);
  return rep;
}

inline ValidationReport validate_against_analytic(const SimConfig& c, double tolerance_sigma,
                                                  const TraceSink& sink = {}) {
  return compare(simulate(c, sink), analytic_targets(c), tolerance_sigma);
}

}  // namespace flra::sim
