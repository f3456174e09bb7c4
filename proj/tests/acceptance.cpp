// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "flra/flra.hpp"
#include "oracles.hpp"

using namespace flra;

#ifndef FLRA_SCENARIO_DIR
#error "FLRA_SCENARIO_DIR must point at the shipped scenarios"
#endif

namespace {

constexpr double kInvE = 1.0 / std::numbers::e;

struct Outcome {
  bool pass = true;
  std::string detail;
  std::vector<std::string> failures;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      failures.push_back(what);
    }
  }
};

int g_failed = 0;

void print_result(int id, const char* name, const Outcome& o) {
  std::printf("%s %d %-22s %s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str());
  for (const auto& f : o.failures) std::printf("       - %s\n", f.c_str());
  std::fflush(stdout);
  if (!o.pass) ++g_failed;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

SystemParams config(int k) {
  return load_scenario(std::string(FLRA_SCENARIO_DIR) + "/c" + std::to_string(k) + ".json").params;
}

// Reference optima, two decimals each, in display units:
// t_tx_fl [s], t_pkt [us], e_bit_fl [nJ/bit], e_bit_ra [nJ/bit], e_fl [J], e_ra [J], e_tot [J],
// p_s, rho*, lambda* [1e5 pkts/s].
constexpr std::array<const char*, 10> kColumns = {"t_tx_fl", "t_pkt", "e_bit_fl", "e_bit_ra", "e_fl",
                                                  "e_ra",    "e_tot", "p_s",      "rho",      "lambda"};
using Row = std::array<double, 10>;
constexpr std::array<std::array<Row, 2>, 5> kReference = {{
    {{{0.22, 1.05, 2.37, 0.62, 0.87, 0.42, 1.29, 0.46, 0.96, 4.06},
      {0.38, 0.97, 4.19, 0.57, 1.54, 0.38, 1.92, 0.46, 0.53, 4.02}}},
    {{{0.24, 0.99, 2.58, 0.58, 0.95, 3.93, 4.88, 0.46, 0.88, 4.07},
      {0.47, 0.97, 5.16, 0.42, 1.90, 2.82, 4.71, 0.62, 0.42, 2.97}}},
    {{{0.64, 1.13, 6.96, 0.70, 7.67, 4.21, 11.87, 0.43, 0.93, 4.30},
      {1.08, 0.99, 11.76, 0.57, 12.96, 3.43, 16.38, 0.46, 0.53, 3.90}}},
    {{{0.64, 1.07, 6.95, 0.65, 7.66, 5.83, 13.49, 0.44, 0.93, 4.18},
      {1.11, 0.98, 12.05, 0.54, 13.28, 4.84, 18.11, 0.49, 0.52, 3.74}}},
    {{{0.70, 0.99, 7.66, 0.69, 8.44, 62.41, 70.85, 0.38, 0.84, 5.00},
      {1.60, 0.97, 17.43, 0.53, 19.20, 48.10, 67.30, 0.48, 0.35, 5.00}}},
}};

Row display(const Solution& s) {
  return {s.t_tx_fl,         s.t_pkt_avg * 1e6, s.e_bit_fl * 1e9, s.e_bit_ra * 1e9, s.e_fl_total,
          s.e_ra_total,      s.e_total,         s.p_success,       s.rho_star.value(), s.lambda_star / 1e5};
}

std::array<std::array<Solution, 2>, 5> g_optima;

Outcome table_reproduction() {
  Outcome o;
  int cells = 0, ok = 0;
  double worst = 0.0;
  for (int k = 0; k < 5; ++k) {
    const auto p = config(k + 1);
    for (int j = 0; j < 2; ++j) {
      const auto s = solve(kProtocols[j], p);
      g_optima[k][j] = s;
      if (!s.feasible) {
        o.require(false, fmt("C%d-%s infeasible", k + 1, short_name(kProtocols[j]).data()));
        continue;
      }
      const Row got = display(s);
      for (std::size_t c = 0; c < kColumns.size(); ++c) {
        const double ref = kReference[k][j][c];
        const double tol = std::max(0.005, 0.02 * std::abs(ref));
        const double err = std::abs(got[c] - ref);
        worst = std::max(worst, err / tol);
        ++cells;
        if (err <= tol + 1e-12) {
          ++ok;
        } else {
          o.require(false, fmt("C%d-%s %s = %.4f, reference %.2f (tol %.4f)", k + 1,
                               short_name(kProtocols[j]).data(), kColumns[c], got[c], ref, tol));
        }
      }
    }
  }
  o.detail = fmt("%d/%d cells within max(half a printed digit, 2%%); worst error %.2f of tolerance; "
                 "E_tot C1-A %.2f C2-SA %.2f C5-SA %.2f",
                 ok, cells, worst, g_optima[0][0].e_total, g_optima[1][1].e_total, g_optima[4][1].e_total);
  return o;
}

Outcome winner_margins() {
  Outcome o;
  struct Ref { Protocol winner; double margin_pct; };
  const std::array<Ref, 5> ref = {{{Protocol::Aloha, 48.8},
                                   {Protocol::SlottedAloha, 3.6},
                                   {Protocol::Aloha, 38.0},
                                   {Protocol::Aloha, 34.2},
                                   {Protocol::SlottedAloha, 5.3}}};
  std::string d;
  for (int k = 0; k < 5; ++k) {
    const auto& a = g_optima[k][0];
    const auto& sa = g_optima[k][1];
    const Protocol winner = a.e_total <= sa.e_total ? Protocol::Aloha : Protocol::SlottedAloha;
    const double m = 100.0 * winning_margin(a, sa);
    d += fmt("C%d %s+%.1f%% ", k + 1, short_name(winner).data(), m);
    o.require(winner == ref[k].winner, fmt("C%d winner %s", k + 1, short_name(winner).data()));
    o.require(std::abs(m - ref[k].margin_pct) <= 2.0,
              fmt("C%d margin %.2f%% vs %.1f%% (+-2pp)", k + 1, m, ref[k].margin_pct));
  }
  o.detail = d + "(+-2pp)";
  return o;
}

Outcome throughput_landscape() {
  Outcome o;
  const auto p = default_params();
  const auto rm = rho_min(p);
  if (!rm) {
    o.require(false, "rho_min missing");
    return o;
  }
  const double rmin = *rm;
  const double rscan = static_cast<double>(oracle::rho_min_scan(p, 1e-5L));
  o.require(std::abs(rmin - rscan) <= 1e-4, fmt("bisection %.6f vs scan %.6f", rmin, rscan));
  o.require(std::abs(rmin - 0.0652) <= 5e-4, fmt("rho_min %.5f vs 0.0652", rmin));

  const auto qmax = [&](Protocol proto, double rho) {
    const BandwidthShare r(rho);
    return max_throughput(proto, p, r, fl_tx_time(p, r)).q_max;
  };
  const double qa0 = qmax(Protocol::Aloha, rmin), qsa0 = qmax(Protocol::SlottedAloha, rmin);
  o.require(std::abs(qa0 / (kInvE / 2) - 1) <= 0.01, fmt("ALOHA q_max(rho_min) %.4f vs 1/(2e)", qa0));
  o.require(std::abs(qsa0 / kInvE - 1) <= 0.05, fmt("S-ALOHA q_max(rho_min) %.4f vs 1/e", qsa0));

  // Constant-bandwidth limit (no shared phase).
  const double ca = max_throughput(Protocol::Aloha, p, BandwidthShare(0.0), 0.0).q_max;
  const double csa = max_throughput(Protocol::SlottedAloha, p, BandwidthShare(0.0), 0.0).q_max;
  o.require(std::abs(ca - kInvE / 2) <= 1e-6 && std::abs(csa - kInvE) <= 1e-6,
            fmt("constant-bandwidth peaks %.8f %.8f", ca, csa));

  double min_rho = 0, min_q = 1, cross = -1;
  double prev_diff = qa0 - qsa0;
  for (int i = 1;; ++i) {
    const double rho = rmin + i * 1e-3;
    if (rho >= 0.999) break;
    const double qa = qmax(Protocol::Aloha, rho), qsa = qmax(Protocol::SlottedAloha, rho);
    if (rho > 0.5 && qa < min_q) {
      min_q = qa;
      min_rho = rho;
    }
    const double diff = qa - qsa;
    if (cross < 0 && (diff >= 0) != (prev_diff >= 0)) cross = rho - 1e-3 * diff / (diff - prev_diff);
    prev_diff = diff;
  }
  o.require(std::abs(min_rho - 0.82) <= 0.05, fmt("ALOHA interior minimum at %.3f", min_rho));
  o.require(cross > 0 && std::abs(cross - 0.55) <= 0.05, fmt("curves cross at %.3f", cross));

  o.detail = fmt("rho_min %.5f (scan %.5f; the coarse bound rho<0.1 is approximate), q_max(rho_min) A %.4f "
                 "SA %.4f, A min at %.3f, cross at %.3f",
                 rmin, rscan, qa0, qsa0, min_rho, cross);
  return o;
}

// Largest N up to which ALOHA wins; monotone is false if the winner flips back.
struct Crossover { int last_aloha = 0; bool monotone = true; bool feasible = true; };

Crossover crossover(double q) {
  auto base = default_params();
  base.q_min = q;
  Crossover c;
  bool switched = false;
  for (int n = 10; n <= 100; n += 10) {
    const auto p = with_fl_devices(base, n);
    const auto a = solve(Protocol::Aloha, p);
    const auto sa = solve(Protocol::SlottedAloha, p);
    if (!a.feasible && !sa.feasible) {
      c.feasible = false;
      continue;
    }
    const bool aloha = a.feasible && (!sa.feasible || a.e_total < sa.e_total);
    if (aloha) {
      if (switched) c.monotone = false;
      c.last_aloha = n;
    } else {
      switched = true;
    }
  }
  return c;
}

Outcome sensitivity() {
  Outcome o;
  const auto c178 = crossover(0.178), c170 = crossover(0.17), c182 = crossover(0.182);
  for (const auto& [q, c] : {std::pair{0.178, c178}, {0.17, c170}, {0.182, c182}}) {
    o.require(c.monotone, fmt("q=%.3f winner flips back", q));
    o.require(c.feasible, fmt("q=%.3f infeasible N in sweep", q));
  }
  o.require(std::abs(c178.last_aloha - 60) <= 10, fmt("q=0.178 ALOHA up to N=%d", c178.last_aloha));
  o.require(c170.last_aloha == 100, fmt("q=0.17 ALOHA up to N=%d", c170.last_aloha));
  o.require(std::abs(c182.last_aloha - 20) <= 10, fmt("q=0.182 ALOHA up to N=%d", c182.last_aloha));
  o.detail = fmt("ALOHA wins up to N=%d (q=0.178), N=%d (q=0.17), N=%d (q=0.182)", c178.last_aloha,
                 c170.last_aloha, c182.last_aloha);
  return o;
}

sim::SimConfig sim_config(const SystemParams& p, Protocol proto, double lambda, double rho, std::uint64_t seed) {
  sim::SimConfig c;
  c.params = p;
  c.protocol = proto;
  c.lambda_total = lambda;
  c.rho = BandwidthShare(rho);
  c.seed = seed;
  const double per_round = lambda * p.t_round;
  c.n_rounds = static_cast<std::size_t>(std::max(1.0, std::ceil(1.1e6 / per_round)));
  return c;
}

Outcome monte_carlo() {
  Outcome o;
  std::vector<std::pair<std::string, sim::SimConfig>> points;
  for (int k = 0; k < 5; ++k) {
    const auto p = config(k + 1);
    for (int j = 0; j < 2; ++j) {
      const auto& s = g_optima[k][j];
      points.emplace_back(fmt("C%d-%s", k + 1, short_name(kProtocols[j]).data()),
                          sim_config(p, kProtocols[j], s.lambda_star, s.rho_star.value(), 1000 + 2 * k + j));
    }
  }
  std::mt19937_64 rng(20240611);
  std::uniform_int_distribution<int> pick_cfg(1, 5), pick_proto(0, 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  while (points.size() < 15) {
    const auto p = config(pick_cfg(rng));
    const Protocol proto = kProtocols[pick_proto(rng)];
    const auto rm = rho_min(p);
    const double rho = *rm + unit(rng) * (0.99 - *rm);
    const BandwidthShare r(rho);
    const double t_tx = fl_tx_time(p, r);
    const auto lo = lambda_min(proto, p, r, t_tx);
    if (!lo) continue;
    const double peak = max_throughput(proto, p, r, t_tx).lambda_peak;
    const double lambda = *lo + unit(rng) * (peak - *lo);
    if (throughput(proto, p, lambda, r, t_tx) < p.q_min * (1 - 1e-9)) continue;
    points.emplace_back(fmt("rand-%s(%.0f,%.3f)", short_name(proto).data(), lambda, rho),
                        sim_config(p, proto, lambda, rho, 5000 + points.size()));
  }
  std::uint64_t min_attempts = ~0ull;
  double worst = 0.0;
  for (const auto& [name, cfg] : points) {
    const auto rep = sim::validate_against_analytic(cfg, 3.0);
    min_attempts = std::min(min_attempts, rep.stats.attempts);
    o.require(rep.stats.attempts >= 1000000, fmt("%s only %llu packets", name.c_str(),
                                                 static_cast<unsigned long long>(rep.stats.attempts)));
    for (const auto& c : rep.checks) {
      if (!c.vacuous) worst = std::max(worst, std::abs(c.empirical - c.analytic) / c.tolerance);
      o.require(c.pass, fmt("%s %s empirical %.5f analytic %.5f tol %.5f", name.c_str(), c.quantity.c_str(),
                             c.empirical, c.analytic, c.tolerance));
    }
  }
  o.detail = fmt("%zu points (10 optima + 5 random), P_s, Q and per-phase factors within 3 s.e. + 0.01; "
                 ">= %llu packets each; worst %.2f of tolerance",
                 points.size(), static_cast<unsigned long long>(min_attempts), worst);
  return o;
}

Outcome optimality() {
  Outcome o;
  double worst_q = 0.0, worst_e = 0.0;
  int roots = 0;
  for (int k = 0; k < 5; ++k) {
    const auto p = config(k + 1);
    for (int j = 0; j < 2; ++j) {
      const auto& s = g_optima[k][j];
      const std::string tag = fmt("C%d-%s", k + 1, short_name(kProtocols[j]).data());
      if (s.binding == Binding::ThroughputRoot) {
        ++roots;
        const double rel = std::abs(s.q_achieved - p.q_min) / p.q_min;
        worst_q = std::max(worst_q, rel);
        o.require(rel <= 1e-6, fmt("%s |Q-q|/q = %.2e", tag.c_str(), rel));
      } else {
        o.require(s.q_achieved >= p.q_min * (1 - 1e-9), fmt("%s floor-bound but Q < q", tag.c_str()));
      }

      const auto coarse = solve(kProtocols[j], p, {0.01, true});
      const auto b = oracle::brute_force(j == 0, p, 1e-3L, 250.0L, 1.5e6L);
      const double eb = static_cast<double>(b.energy);
      const double rel = std::abs(coarse.e_total - eb) / eb;
      worst_e = std::max(worst_e, rel);
      o.require(std::isfinite(eb) && rel <= 0.005,
                fmt("%s grid %.5f J vs brute %.5f J", tag.c_str(), coarse.e_total, eb));

      const auto again = solve(kProtocols[j], p);
      o.require(again.e_total == s.e_total && again.rho_star.value() == s.rho_star.value() &&
                    again.lambda_star == s.lambda_star,
                fmt("%s solve not deterministic", tag.c_str()));
    }
  }
  const auto cfg = sim_config(config(2), Protocol::SlottedAloha, g_optima[1][1].lambda_star,
                              g_optima[1][1].rho_star.value(), 77);
  const auto s1 = sim::simulate(cfg), s2 = sim::simulate(cfg);
  o.require(s1.attempts == s2.attempts && s1.successes == s2.successes && s1.throughput_hat == s2.throughput_hat,
            "simulate not deterministic");
  o.detail = fmt("%d root-bound optima |Q-q|/q <= %.1e; 0.01 grid vs 1e-3 brute force worst %.3f%%; "
                 "solve and simulate deterministic",
                 roots, worst_q, 100 * worst_e);
  return o;
}

}  // namespace

int main() {
  try {
    print_result(1, "table-reproduction", table_reproduction());
    print_result(2, "winner-margins", winner_margins());
    print_result(3, "throughput-landscape", throughput_landscape());
    print_result(4, "sensitivity", sensitivity());
    print_result(5, "monte-carlo", monte_carlo());
    print_result(6, "optimality", optimality());
  } catch (const std::exception& e) {
    std::printf("FAIL acceptance aborted: %s\n", e.what());
    return 1;
  }
  return g_failed == 0 ? 0 : 1;
}
