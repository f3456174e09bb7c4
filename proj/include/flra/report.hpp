#pragma once

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "flra/mc_sim.hpp"
#include "flra/optimizer.hpp"

namespace flra::report {

// CSV writers. Numbers use 6 significant digits so output is stable for
// fixed inputs.

inline std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline std::string flag(bool b) { return b ? "true" : "false"; }

inline void write_row(std::ostream& os, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
  os << '\n';
}

inline const std::vector<std::string>& solution_columns() {
  static const std::vector<std::string> cols = {
      "protocol", "rho_star", "lambda_star_pkts_s", "t_tx_fl_s", "t_pkt_avg_s", "e_fl_J",
      "e_ra_J",   "e_tot_J",  "e_bit_fl_J",         "e_bit_ra_J", "p_success",  "binding",
      "feasible"};
  return cols;
}

inline std::vector<std::string> solution_cells(const Solution& s) {
  return {std::string(to_string(s.protocol)), num(s.rho_star.value()), num(s.lambda_star),
          num(s.t_tx_fl),  num(s.t_pkt_avg),  num(s.e_fl_total),  num(s.e_ra_total),
          num(s.e_total),  num(s.e_bit_fl),   num(s.e_bit_ra),    num(s.p_success),
          std::string(to_string(s.binding)),  flag(s.feasible)};
}

inline void write_solutions(std::ostream& os, const std::vector<Solution>& sols) {
  write_row(os, solution_columns());
  for (const auto& s : sols) write_row(os, solution_cells(s));
}

/// Rows of a sweep over n_fl or lambda_fresh.
struct SolutionSweepRow {
  double x;
  double packets_per_round;
  Solution solution;
};

inline void write_solution_sweep(std::ostream& os, const std::string& axis,
                                 const std::vector<SolutionSweepRow>& rows) {
  std::vector<std::string> header = {axis, "ra_packets_per_round"};
  header.insert(header.end(), solution_columns().begin(), solution_columns().end());
  header.insert(header.end(), {"e_ra_packet_J", "infeasibility"});
  write_row(os, header);
  for (const auto& r : rows) {
    std::vector<std::string> cells = {num(r.x), num(r.packets_per_round)};
    const auto sc = solution_cells(r.solution);
    cells.insert(cells.end(), sc.begin(), sc.end());
    cells.push_back(num(r.solution.e_ra_packet));
    cells.emplace_back(to_string(r.solution.infeasibility));
    write_row(os, cells);
  }
}

struct RhoSweepRow {
  Protocol protocol;
  RhoPoint point;
};

inline void write_rho_sweep(std::ostream& os, const std::vector<RhoSweepRow>& rows) {
  write_row(os, {"rho", "protocol", "latency_feasible", "throughput_feasible", "feasible",
                 "t_tx_fl_s", "lambda_peak_pkts_s", "q_max", "lambda_star_pkts_s",
                 "e_fl_device_J", "e_fl_J", "e_ra_packet_J", "e_tot_J"});
  for (const auto& r : rows) {
    const RhoPoint& p = r.point;
    write_row(os, {num(p.rho), std::string(to_string(r.protocol)), flag(p.latency_feasible),
                   flag(p.throughput_feasible), flag(p.latency_feasible && p.throughput_feasible),
                   num(p.t_tx_fl), num(p.lambda_peak), num(p.q_max), num(p.lambda_star),
                   num(p.e_fl_device), num(p.e_fl_total), num(p.e_ra_packet), num(p.e_total)});
  }
}

inline void write_validation_header(std::ostream& os) {
  write_row(os, {"protocol", "lambda_pkts_s", "rho", "t_tx_fl_s", "quantity", "empirical",
                 "stderr", "analytic", "tolerance", "samples", "vacuous", "pass"});
}

inline void write_validation_rows(std::ostream& os, const sim::SimConfig& cfg,
                                  const sim::ValidationReport& rep) {
  for (const auto& c : rep.checks)
    write_row(os, {std::string(to_string(cfg.protocol)), num(cfg.lambda_total),
                   num(cfg.rho.value()), num(cfg.upload_time()), c.quantity, num(c.empirical),
                   num(c.stderr_), num(c.analytic), num(c.tolerance), std::to_string(c.samples),
                   flag(c.vacuous), flag(c.pass)});
}

inline void write_trace_header(std::ostream& os) {
  write_row(os, {"arrival_time_s", "phase", "duration_s", "outcome"});
}

inline void write_trace_record(std::ostream& os, const sim::TraceRecord& r) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.17g,%s,%.17g,%s\n", r.arrival_time,
                r.phase == sim::Phase::Full ? "full" : "shared", r.duration,
                r.success ? "success" : "collision");
  os << buf;
}

/// Side-by-side table of both protocols; the lower-energy feasible one is
/// starred.
inline void write_summary(std::ostream& os, const std::vector<Solution>& sols) {
  const Solution* winner = nullptr;
  for (const auto& s : sols)
    if (s.feasible && (!winner || s.e_total < winner->e_total)) winner = &s;

  auto line = [&](const char* label, auto cell) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%-22s", label);
    os << buf;
    for (const auto& s : sols) {
      std::snprintf(buf, sizeof buf, "%22s", cell(s).c_str());
      os << buf;
    }
    os << '\n';
  };
  auto fixed = [](double v, int prec) {
    if (!std::isfinite(v)) return num(v);
    char b[32];
    std::snprintf(b, sizeof b, "%.*f", prec, v);
    return std::string(b);
  };
  line("", [&](const Solution& s) {
    return std::string(short_name(s.protocol)) + (&s == winner ? " *" : "");
  });
  line("T_tx^FL [s]", [&](const Solution& s) { return fixed(s.t_tx_fl, 2); });
  line("T_tx^RA [us]", [&](const Solution& s) { return fixed(s.t_pkt_avg * 1e6, 2); });
  line("E_b^FL [nJ/bit]", [&](const Solution& s) { return fixed(s.e_bit_fl * 1e9, 2); });
  line("E_b^RA [nJ/bit]", [&](const Solution& s) { return fixed(s.e_bit_ra * 1e9, 2); });
  line("E^FL [J]", [&](const Solution& s) { return fixed(s.e_fl_total, 2); });
  line("E^RA [J]", [&](const Solution& s) { return fixed(s.e_ra_total, 2); });
  line("E_tot [J]", [&](const Solution& s) { return fixed(s.e_total, 2); });
  line("P_s", [&](const Solution& s) { return fixed(s.p_success, 2); });
  line("rho*", [&](const Solution& s) { return fixed(s.rho_star.value(), 2); });
  line("lambda* [1e5 pkts/s]", [&](const Solution& s) { return fixed(s.lambda_star / 1e5, 2); });
  line("binding", [&](const Solution& s) { return std::string(to_string(s.binding)); });
  line("feasible", [&](const Solution& s) {
    return s.feasible ? std::string("yes") : "no (" + std::string(to_string(s.infeasibility)) + ")";
  });
  if (winner && sols.size() == 2 && sols[0].feasible && sols[1].feasible) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%s is %.1f%% more energy-efficient\n",
                  std::string(short_name(winner->protocol)).c_str(),
                  100.0 * winning_margin(sols[0], sols[1]));
    os << buf;
  }
}

}  // namespace flra::report
