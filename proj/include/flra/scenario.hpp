#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "flra/params.hpp"

namespace flra {

enum class ProtocolSelection { Aloha, SlottedAloha, Both };

inline ProtocolSelection selection_from_string(const std::string& s) {
  if (s == "both") return ProtocolSelection::Both;
  return protocol_from_string(s) == Protocol::Aloha ? ProtocolSelection::Aloha
                                                     : ProtocolSelection::SlottedAloha;
}

inline std::string to_string(ProtocolSelection s) {
  switch (s) {
    case ProtocolSelection::Aloha: return "aloha";
    case ProtocolSelection::SlottedAloha: return "saloha";
    default: return "both";
  }
}

inline std::vector<Protocol> protocols(ProtocolSelection s) {
  switch (s) {
    case ProtocolSelection::Aloha: return {Protocol::Aloha};
    case ProtocolSelection::SlottedAloha: return {Protocol::SlottedAloha};
    default: return {Protocol::Aloha, Protocol::SlottedAloha};
  }
}

enum class SweepAxis { Rho, NFl, LambdaFresh };

inline SweepAxis axis_from_string(const std::string& s) {
  if (s == "rho") return SweepAxis::Rho;
  if (s == "n_fl") return SweepAxis::NFl;
  if (s == "lambda_fresh") return SweepAxis::LambdaFresh;
  throw std::invalid_argument("unknown sweep axis '" + s + "' (expected rho, n_fl or lambda_fresh)");
}

inline std::string to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::Rho: return "rho";
    case SweepAxis::NFl: return "n_fl";
    default: return "lambda_fresh";
  }
}

/// Inclusive START:STOP:STEP range.
struct Range {
  double start = 0.0;
  double stop = 0.0;
  double step = 1.0;

  std::vector<double> values() const {
    if (!(step > 0.0) || stop < start) throw std::invalid_argument("empty range");
    std::vector<double> out;
    const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9));
    for (std::size_t i = 0; i <= n; ++i) out.push_back(start + static_cast<double>(i) * step);
    return out;
  }

  std::string str() const {
    std::ostringstream os;
    os.precision(17);
    os << start << ':' << stop << ':' << step;
    return os.str();
  }

  friend bool operator==(const Range&, const Range&) = default;
};

inline Range parse_range(const std::string& text) {
  Range r;
  std::istringstream is(text);
  char c1 = 0, c2 = 0;
  if (!(is >> r.start >> c1 >> r.stop >> c2 >> r.step) || c1 != ':' || c2 != ':' || !is.eof())
    throw std::invalid_argument("range must be START:STOP:STEP, got '" + text + "'");
  r.values();  // rejects empty ranges
  return r;
}

struct Scenario {
  SystemParams params;
  ProtocolSelection protocol = ProtocolSelection::Both;
  double grid_step = 1e-3;
  bool refine = true;
  std::optional<SweepAxis> sweep_axis;
  std::optional<Range> sweep_range;
  std::uint64_t seed = 1;
  std::size_t n_rounds = 1;
  std::string out_dir = ".";

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

namespace detail {

inline const std::set<std::string>& scenario_keys() {
  static const std::set<std::string> keys = {
      "n_fl",     "lambda_fresh", "t_cpu",    "t_round",    "q_min",    "eps_retx",
      "bandwidth", "s_fl",        "s_ra",     "gains_fl",   "gain_ra",  "p_tx_fl",
      "p_tx_ra",  "n0",           "protocol", "grid_step",  "refine",   "sweep_axis",
      "sweep_range", "seed",      "n_rounds", "out_dir"};
  return keys;
}

inline const char* kRequired[] = {"n_fl",   "lambda_fresh", "t_cpu",   "t_round", "q_min",
                                  "eps_retx", "bandwidth",  "s_fl",    "s_ra",    "gains_fl",
                                  "gain_ra", "p_tx_fl",     "p_tx_ra", "n0"};

}  // namespace detail

/// Parses a flat JSON scenario. Unknown keys and missing physical
/// parameters are errors. `gains_fl` may be a list or a scalar broadcast to
/// all n_fl devices.
inline Scenario scenario_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("scenario must be a JSON object");
  for (const auto& [key, _] : j.items())
    if (!detail::scenario_keys().count(key))
      throw std::invalid_argument("unknown scenario key '" + key + "'");
  for (const char* key : detail::kRequired)
    if (!j.contains(key)) throw std::invalid_argument(std::string("missing scenario key '") + key + "'");

  Scenario s;
  SystemParams& p = s.params;
  try {
    p.n_fl = j.at("n_fl").get<std::size_t>();
    p.lambda_fresh = j.at("lambda_fresh").get<double>();
    p.t_cpu = j.at("t_cpu").get<double>();
    p.t_round = j.at("t_round").get<double>();
    p.q_min = j.at("q_min").get<double>();
    p.eps_retx = j.at("eps_retx").get<double>();
    p.bandwidth = j.at("bandwidth").get<double>();
    p.s_fl = j.at("s_fl").get<double>();
    p.s_ra = j.at("s_ra").get<double>();
    const auto& g = j.at("gains_fl");
    p.gains_fl = g.is_array() ? g.get<std::vector<double>>()
                              : std::vector<double>(p.n_fl, g.get<double>());
    p.gain_ra = j.at("gain_ra").get<double>();
    p.p_tx_fl = j.at("p_tx_fl").get<double>();
    p.p_tx_ra = j.at("p_tx_ra").get<double>();
    p.n0 = j.at("n0").get<double>();
    if (j.contains("protocol")) s.protocol = selection_from_string(j["protocol"].get<std::string>());
    if (j.contains("grid_step")) s.grid_step = j["grid_step"].get<double>();
    if (j.contains("refine")) s.refine = j["refine"].get<bool>();
    if (j.contains("sweep_axis")) s.sweep_axis = axis_from_string(j["sweep_axis"].get<std::string>());
    if (j.contains("sweep_range")) s.sweep_range = parse_range(j["sweep_range"].get<std::string>());
    if (j.contains("seed")) s.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("n_rounds")) s.n_rounds = j["n_rounds"].get<std::size_t>();
    if (j.contains("out_dir")) s.out_dir = j["out_dir"].get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed scenario: ") + e.what());
  }
  validate(p);
  if (!(s.grid_step > 0.0 && s.grid_step <= 0.1))
    throw std::invalid_argument("grid_step must lie in (0, 0.1]");
  if (s.n_rounds < 1) throw std::invalid_argument("n_rounds must be at least 1");
  return s;
}

inline nlohmann::ordered_json to_json(const Scenario& s) {
  const SystemParams& p = s.params;
  nlohmann::ordered_json j;
  j["n_fl"] = p.n_fl;
  j["lambda_fresh"] = p.lambda_fresh;
  j["t_cpu"] = p.t_cpu;
  j["t_round"] = p.t_round;
  j["q_min"] = p.q_min;
  j["eps_retx"] = p.eps_retx;
  j["bandwidth"] = p.bandwidth;
  j["s_fl"] = p.s_fl;
  j["s_ra"] = p.s_ra;
  j["gains_fl"] = p.gains_fl;
  j["gain_ra"] = p.gain_ra;
  j["p_tx_fl"] = p.p_tx_fl;
  j["p_tx_ra"] = p.p_tx_ra;
  j["n0"] = p.n0;
  j["protocol"] = to_string(s.protocol);
  j["grid_step"] = s.grid_step;
  j["refine"] = s.refine;
  if (s.sweep_axis) j["sweep_axis"] = to_string(*s.sweep_axis);
  if (s.sweep_range) j["sweep_range"] = s.sweep_range->str();
  j["seed"] = s.seed;
  j["n_rounds"] = s.n_rounds;
  j["out_dir"] = s.out_dir;
  return j;
}

inline Scenario scenario_from_json(const nlohmann::ordered_json& j) {
  return scenario_from_json(nlohmann::json::parse(j.dump()));
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("'" + path + "' is not valid JSON: " + e.what());
  }
  return scenario_from_json(j);
}

inline void save_scenario(const Scenario& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write scenario file '" + path + "'");
  out << to_json(s).dump(2) << '\n';
}

}  // namespace flra
