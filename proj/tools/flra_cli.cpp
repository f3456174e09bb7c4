// Command-line front end: solve, sweep and simulate scenarios.
//
//   flra_cli solve    --scenario scenarios/c1.json [--protocol both] [--grid-step 1e-3]
//   flra_cli sweep    --scenario scenarios/table1.json --axis n_fl --range 10:100:10
//   flra_cli simulate --scenario scenarios/c1.json [--lambda L --rho R] [--seed S] [--rounds N]
//
// Exit codes: 0 success, 2 infeasible, 3 validation failure, 64 usage error.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "flra/flra.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInfeasible = 2;
constexpr int kExitValidation = 3;
constexpr int kExitUsage = 64;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CommonArgs {
  std::string scenario;
  std::optional<std::string> protocol;
  std::optional<double> grid_step;
  std::optional<std::string> out;
  bool no_refine = false;
};

struct Loaded {
  flra::Scenario scenario;
  std::vector<flra::Protocol> protocols;
  flra::SolveOptions solve;
  fs::path out;
};

Loaded load(const CommonArgs& a) {
  Loaded l;
  try {
    l.scenario = flra::load_scenario(a.scenario);
    if (a.protocol) l.scenario.protocol = flra::selection_from_string(*a.protocol);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  l.protocols = flra::protocols(l.scenario.protocol);
  l.solve.grid_step = a.grid_step.value_or(l.scenario.grid_step);
  l.solve.refine = l.scenario.refine && !a.no_refine;
  if (!(l.solve.grid_step > 0.0 && l.solve.grid_step <= 0.1))
    throw UsageError("--grid-step must lie in (0, 0.1]");
  l.out = a.out.value_or(l.scenario.out_dir);
  fs::create_directories(l.out);
  return l;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  return os;
}

std::string describe_infeasible(const flra::Solution& s, const flra::SystemParams& p) {
  std::ostringstream os;
  os << to_string(s.protocol) << ": infeasible, ";
  if (s.infeasibility == flra::Infeasibility::Latency)
    os << "latency constraint violated (FL upload exceeds the " << p.latency_budget()
       << " s budget even at rho = 1)";
  else
    os << "throughput constraint violated (q = " << p.q_min
       << " exceeds the maximum achievable throughput at every feasible rho)";
  return os.str();
}

int run_solve(const CommonArgs& a) {
  const Loaded l = load(a);
  std::vector<flra::Solution> sols;
  for (auto proto : l.protocols) sols.push_back(flra::solve(proto, l.scenario.params, l.solve));

  auto csv = open_out(l.out / "solution.csv");
  flra::report::write_solutions(csv, sols);
  std::ostringstream summary;
  flra::report::write_summary(summary, sols);
  open_out(l.out / "summary.txt") << summary.str();
  std::cout << summary.str();

  int rc = kExitOk;
  for (const auto& s : sols) {
    if (!s.feasible) {
      std::cerr << describe_infeasible(s, l.scenario.params) << '\n';
      rc = kExitInfeasible;
    }
  }
  return rc;
}

int run_sweep(const CommonArgs& a, std::optional<std::string> axis_arg,
              std::optional<std::string> range_arg) {
  const Loaded l = load(a);
  flra::SweepAxis axis;
  flra::Range range;
  try {
    if (axis_arg)
      axis = flra::axis_from_string(*axis_arg);
    else if (l.scenario.sweep_axis)
      axis = *l.scenario.sweep_axis;
    else
      throw UsageError("sweep needs --axis (or sweep_axis in the scenario)");
    if (range_arg)
      range = flra::parse_range(*range_arg);
    else if (l.scenario.sweep_range)
      range = *l.scenario.sweep_range;
    else
      throw UsageError("sweep needs --range (or sweep_range in the scenario)");
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const auto values = range.values();
  const auto& params = l.scenario.params;
  auto csv = open_out(l.out / "sweep.csv");

  if (axis == flra::SweepAxis::Rho) {
    std::vector<flra::report::RhoSweepRow> rows;
    for (double v : values) {
      if (v < -1e-9 || v > 1.0 + 1e-9) throw UsageError("rho range must stay within [0, 1]");
      const flra::BandwidthShare rho(std::clamp(v, 0.0, 1.0));
      for (auto proto : l.protocols) rows.push_back({proto, flra::evaluate_rho(params, proto, rho)});
    }
    flra::report::write_rho_sweep(csv, rows);
  } else {
    std::vector<flra::report::SolutionSweepRow> rows;
    for (double v : values) {
      flra::SystemParams p = params;
      if (axis == flra::SweepAxis::NFl) {
        if (v < 1.0) throw UsageError("n_fl values must be at least 1");
        p = flra::with_fl_devices(params, static_cast<std::size_t>(std::llround(v)));
      } else {
        if (v <= 0.0) throw UsageError("lambda_fresh values must be positive");
        p.lambda_fresh = v;
      }
      for (auto proto : l.protocols)
        rows.push_back({v, p.fresh_packets_per_round(), flra::solve(proto, p, l.solve)});
    }
    flra::report::write_solution_sweep(csv, to_string(axis), rows);
  }
  std::cout << "wrote " << (l.out / "sweep.csv").string() << " (" << values.size()
            << " points x " << l.protocols.size() << " protocol(s))\n";
  return kExitOk;
}

struct SimArgs {
  std::optional<double> lambda;
  std::optional<double> rho;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> rounds;
  double sigma = 3.0;
  std::optional<std::string> trace;
};

int run_simulate(const CommonArgs& a, const SimArgs& s) {
  const Loaded l = load(a);
  if (s.lambda.has_value() != s.rho.has_value())
    throw UsageError("--lambda and --rho must be given together");
  const auto& params = l.scenario.params;

  auto csv = open_out(l.out / "sim.csv");
  flra::report::write_validation_header(csv);
  std::optional<std::ofstream> trace;
  if (s.trace) {
    trace.emplace(*s.trace);
    if (!*trace) throw std::runtime_error("cannot write " + *s.trace);
    flra::report::write_trace_header(*trace);
  }

  bool all_pass = true;
  for (auto proto : l.protocols) {
    flra::sim::SimConfig cfg;
    cfg.params = params;
    cfg.protocol = proto;
    cfg.seed = s.seed.value_or(l.scenario.seed);
    cfg.n_rounds = s.rounds.value_or(l.scenario.n_rounds);
    if (s.lambda) {
      if (*s.lambda < 0.0) throw UsageError("--lambda must be >= 0");
      if (*s.rho < 0.0 || *s.rho > 1.0) throw UsageError("--rho must lie in [0, 1]");
      cfg.lambda_total = *s.lambda;
      cfg.rho = flra::BandwidthShare(*s.rho);
    } else {
      const auto sol = flra::solve(proto, params, l.solve);
      if (!sol.feasible) {
        std::cerr << describe_infeasible(sol, params) << '\n';
        return kExitInfeasible;
      }
      cfg.lambda_total = sol.lambda_star;
      cfg.rho = sol.rho_star;
    }
    if (!flra::fl_latency_feasible(params, cfg.rho)) {
      std::cerr << "rho = " << cfg.rho.value() << " violates the FL latency budget\n";
      return kExitInfeasible;
    }
    flra::sim::TraceSink sink;
    if (trace) sink = [&](const flra::sim::TraceRecord& r) { flra::report::write_trace_record(*trace, r); };
    const auto rep = flra::sim::validate_against_analytic(cfg, s.sigma, sink);
    flra::report::write_validation_rows(csv, cfg, rep);

    std::cout << to_string(proto) << " lambda=" << flra::report::num(cfg.lambda_total)
              << " rho=" << flra::report::num(cfg.rho.value()) << " attempts=" << rep.stats.attempts
              << (rep.stats.no_attempts ? " (no attempts)" : "") << '\n';
    for (const auto& c : rep.checks)
      std::cout << "  " << (c.pass ? "PASS " : "FAIL ") << c.quantity
                << " sim=" << flra::report::num(c.empirical)
                << " analytic=" << flra::report::num(c.analytic)
                << " tol=" << flra::report::num(c.tolerance) << (c.vacuous ? " (vacuous)" : "")
                << '\n';
    all_pass = all_pass && rep.passed;
  }
  return all_pass ? kExitOk : kExitValidation;
}

void add_common(CLI::App* cmd, CommonArgs& a) {
  cmd->add_option("--scenario", a.scenario, "Scenario JSON file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--protocol", a.protocol, "aloha, saloha or both")
      ->check(CLI::IsMember({"aloha", "saloha", "both"}));
  cmd->add_option("--grid-step", a.grid_step, "Bandwidth-share grid step");
  cmd->add_option("--out", a.out, "Output directory");
  cmd->add_flag("--no-refine", a.no_refine, "Skip the golden-section pass after the grid search");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint FL / random-access bandwidth and energy optimizer"};
  app.require_subcommand(1);

  CommonArgs common;
  auto* solve = app.add_subcommand("solve", "Optimize (rho, lambda) for each protocol");
  add_common(solve, common);

  auto* sweep = app.add_subcommand("sweep", "Sweep rho, n_fl or lambda_fresh");
  add_common(sweep, common);
  std::optional<std::string> axis, range;
  sweep->add_option("--axis", axis, "rho, n_fl or lambda_fresh");
  sweep->add_option("--range", range, "START:STOP:STEP (inclusive)");

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo check of the collision model");
  add_common(simulate, common);
  SimArgs sim;
  simulate->add_option("--lambda", sim.lambda, "Total attempt rate [pkts/s] (default: optimum)");
  simulate->add_option("--rho", sim.rho, "Bandwidth share (default: optimum)");
  simulate->add_option("--seed", sim.seed, "RNG seed");
  simulate->add_option("--rounds", sim.rounds, "Number of FL rounds to simulate");
  simulate->add_option("--sigma", sim.sigma, "Tolerance in standard errors (plus 0.01 absolute)");
  simulate->add_option("--trace", sim.trace, "Write the per-packet arrival trace to this CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*solve) return run_solve(common);
    if (*sweep) return run_sweep(common, axis, range);
    if (*simulate) return run_simulate(common, sim);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kExitUsage;
}
