#pragma once

// Simulation config: a YAML document whose every field is optional. Omitted
// fields take the values of the selected profile; dB and dBm fields are
// converted to linear units here and nowhere else.
//
//   geometry:  antennas, users, targets, dfbs [x,y,z], ris [x,y,z],
//              area {corner [x,y,z], width, depth}
//   fading:    rician_factor, direct {intercept_db, slope}, ris_link {...}
//   ris:       elements, active, eta_db, nu2_dbm
//   design:    gamma_db, sigma2_dbm, r_max_dbm, pt_per_antenna_db, p_max_dbm,
//              n_rand, iterations, tolerance
//   sweep:     variable (pt | eta | L | gamma), values [...]
//   realizations, seed, threads, schemes [hybrid, passive, random, noris], output

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "hris/channel.hpp"
#include "hris/errors.hpp"
#include "hris/optimizer.hpp"
#include "hris/sysmodel.hpp"
#include "hris/units.hpp"

namespace hris::harness {

enum class Profile { Desk, Paper };

enum class SweepVariable { Pt, Eta, L, Gamma };

inline const char* to_string(SweepVariable v) {
  switch (v) {
    case SweepVariable::Pt: return "pt";
    case SweepVariable::Eta: return "eta";
    case SweepVariable::L: return "L";
    case SweepVariable::Gamma: return "gamma";
  }
  return "?";
}

inline SweepVariable parse_sweep_variable(const std::string& s) {
  for (auto v : {SweepVariable::Pt, SweepVariable::Eta, SweepVariable::L, SweepVariable::Gamma})
    if (s == to_string(v)) return v;
  throw ValidationError("unknown sweep variable '" + s + "'");
}

inline Profile parse_profile(const std::string& s) {
  if (s == "desk") return Profile::Desk;
  if (s == "paper") return Profile::Paper;
  throw ValidationError("unknown profile '" + s + "'");
}

/// Values in the units the user writes them in (dB for pt, eta, gamma).
inline std::vector<double> default_sweep_values(SweepVariable v, Profile p) {
  switch (v) {
    case SweepVariable::Pt: return {-10.0, -5.0, 0.0, 5.0, 10.0};
    case SweepVariable::Eta: return {0.0, 5.0, 10.0};
    case SweepVariable::L: return p == Profile::Desk ? std::vector<double>{0.0, 4.0, 8.0}
                                                       : std::vector<double>{0.0, 10.0, 20.0, 30.0, 40.0};
    case SweepVariable::Gamma: return {0.0, 5.0, 10.0, 15.0};
  }
  return {};
}

struct SimulationConfig {
  channel::ScenarioGeometry geometry;  // positions of users and targets are drawn per realization
  channel::PlacementArea area;
  std::size_t users = 2;
  std::size_t targets = 4;
  channel::FadingParams fading;
  HybridRisSpec spec;
  DesignConfig design;

  // the user-facing values, kept for sweeps and reporting
  double eta_db = 10.0;
  double gamma_db = 5.0;
  double pt_per_antenna_db = 0.0;
  double r_max_dbm = -90.0;

  SweepVariable sweep = SweepVariable::Pt;
  std::vector<double> sweep_values;
  int realizations = 100;
  std::uint64_t seed = 1;
  int threads = 0;  // 0 = hardware concurrency
  std::vector<opt::Scheme> schemes{opt::Scheme::Hybrid, opt::Scheme::PassiveRIS, opt::Scheme::RandomRIS,
                                   opt::Scheme::NoRIS};
  std::string output = "results.csv";

  /// Recompute the linear fields that depend on the dB fields.
  void refresh() {
    spec.eta = units::amplitude_from_power_db(eta_db);
    design.gamma = units::db_to_linear(gamma_db);
    design.p_t = static_cast<double>(geometry.antennas) * units::db_to_linear(pt_per_antenna_db);
    design.r_max = units::dbm_to_mw(r_max_dbm);
    geometry.ris_elements = spec.elements;
  }

  void validate() const {
    for (double v : {eta_db, gamma_db, pt_per_antenna_db, r_max_dbm})
      if (!std::isfinite(v)) throw RangeError("every dB/dBm field must be finite");
    if (sweep_values.empty()) throw RangeError("sweep needs at least one value");
    for (double v : sweep_values)
      if (!std::isfinite(v)) throw RangeError("sweep values must be finite");
    for (std::size_t i = 1; i < sweep_values.size(); ++i)
      if (!(sweep_values[i] > sweep_values[i - 1])) throw RangeError("sweep values must be strictly increasing");
    if (sweep == SweepVariable::Eta && sweep_values.front() < 0.0) throw RangeError("eta sweep values must be >= 0 dB");
    if (sweep == SweepVariable::L)
      for (double v : sweep_values)
        if (v < 0.0 || v != std::floor(v) || v > static_cast<double>(spec.elements))
          throw RangeError("L sweep values must be integers in [0, N]");
    if (realizations < 1) throw RangeError("realizations must be >= 1");
    if (threads < 0) throw RangeError("threads must be >= 0");
    if (schemes.empty()) throw RangeError("at least one scheme is required");
    if (targets < 1) throw RangeError("at least one target is required");
    if (!(area.width > 0.0) || !(area.depth > 0.0)) throw RangeError("placement area must have positive size");
    try {
      geometry.validate();
      fading.validate();
      spec.validate();
      design.validate();
    } catch (const ValidationError& e) {
      throw RangeError(e.what());
    }
  }
};

inline SimulationConfig profile_defaults(Profile p) {
  SimulationConfig c;
  c.geometry.antennas = 16;
  c.spec.elements = 100;
  c.spec.active = 20;
  c.spec.nu2 = units::dbm_to_mw(-60.0);
  c.design.sigma2 = units::dbm_to_mw(-94.0);
  c.design.max_iterations = 10;
  c.targets = 4;
  c.realizations = 100;
  if (p == Profile::Desk) {
    c.geometry.antennas = 8;
    c.spec.elements = 16;
    c.spec.active = 4;
    c.targets = 2;
    c.realizations = 20;
    c.design.max_iterations = 5;
  }
  c.sweep_values = default_sweep_values(c.sweep, p);
  c.refresh();
  return c;
}

namespace detail {

inline std::size_t line_of(const YAML::Node& n) { return n.Mark().line >= 0 ? static_cast<std::size_t>(n.Mark().line) + 1 : 0; }

template <typename T>
T read(const YAML::Node& n, const std::string& field) {
  try {
    return n.as<T>();
  } catch (const YAML::Exception&) {
    throw ParseError("field '" + field + "' has the wrong type", line_of(n), field);
  }
}

inline void only_keys(const YAML::Node& map, const std::string& where, std::initializer_list<const char*> keys) {
  if (!map.IsMap()) throw ParseError("'" + where + "' must be a mapping", line_of(map), where);
  for (const auto& kv : map) {
    const auto key = kv.first.as<std::string>();
    bool known = false;
    for (const char* k : keys) known = known || key == k;
    if (!known) {
      const std::string field = where.empty() ? key : where + "." + key;
      throw ParseError("unknown field '" + field + "'", line_of(kv.first), field);
    }
  }
}

template <typename T>
void maybe(const YAML::Node& map, const char* key, const std::string& where, T& out) {
  if (const auto n = map[key]) out = read<T>(n, where.empty() ? key : where + "." + key);
}

inline void maybe_position(const YAML::Node& map, const char* key, const std::string& where, channel::Position& out) {
  const auto n = map[key];
  if (!n) return;
  const std::string field = where + "." + key;
  const auto v = read<std::vector<double>>(n, field);
  if (v.size() != 3) throw ParseError("field '" + field + "' needs three coordinates", line_of(n), field);
  out = {v[0], v[1], v[2]};
}

inline void maybe_law(const YAML::Node& map, const char* key, channel::PathlossLaw& out) {
  const auto n = map[key];
  if (!n) return;
  const std::string where = std::string("fading.") + key;
  only_keys(n, where, {"intercept_db", "slope"});
  maybe(n, "intercept_db", where, out.intercept_db);
  maybe(n, "slope", where, out.slope);
}

}  // namespace detail

/// Parse a config document on top of the given profile's defaults.
inline SimulationConfig parse_config(const std::string& text, Profile profile = Profile::Paper) {
  SimulationConfig c = profile_defaults(profile);
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ParseError(e.msg, e.mark.line >= 0 ? static_cast<std::size_t>(e.mark.line) + 1 : 0, "");
  }
  if (root.IsNull()) {
    c.validate();
    return c;
  }
  using detail::maybe;
  detail::only_keys(root, "",
                    {"geometry", "fading", "ris", "design", "sweep", "realizations", "seed", "threads", "schemes",
                     "output"});

  if (const auto g = root["geometry"]) {
    detail::only_keys(g, "geometry", {"antennas", "users", "targets", "dfbs", "ris", "area"});
    maybe(g, "antennas", "geometry", c.geometry.antennas);
    for (auto [key, out] : {std::pair{"users", &c.users}, std::pair{"targets", &c.targets}}) {
      int count = static_cast<int>(*out);
      maybe(g, key, "geometry", count);
      if (count < 0) throw RangeError(std::string("geometry.") + key + " must be >= 0");
      *out = static_cast<std::size_t>(count);
    }
    detail::maybe_position(g, "dfbs", "geometry", c.geometry.dfbs);
    detail::maybe_position(g, "ris", "geometry", c.geometry.ris);
    if (const auto a = g["area"]) {
      detail::only_keys(a, "geometry.area", {"corner", "width", "depth"});
      detail::maybe_position(a, "corner", "geometry.area", c.area.corner);
      maybe(a, "width", "geometry.area", c.area.width);
      maybe(a, "depth", "geometry.area", c.area.depth);
    }
  }
  if (const auto f = root["fading"]) {
    detail::only_keys(f, "fading", {"rician_factor", "direct", "ris_link"});
    maybe(f, "rician_factor", "fading", c.fading.rician_factor);
    detail::maybe_law(f, "direct", c.fading.direct);
    detail::maybe_law(f, "ris_link", c.fading.ris_link);
  }
  if (const auto r = root["ris"]) {
    detail::only_keys(r, "ris", {"elements", "active", "eta_db", "nu2_dbm"});
    maybe(r, "elements", "ris", c.spec.elements);
    maybe(r, "active", "ris", c.spec.active);
    maybe(r, "eta_db", "ris", c.eta_db);
    double nu2_dbm = units::mw_to_dbm(c.spec.nu2);
    maybe(r, "nu2_dbm", "ris", nu2_dbm);
    c.spec.nu2 = units::dbm_to_mw(nu2_dbm);
    if (!std::isfinite(nu2_dbm)) throw RangeError("every dB/dBm field must be finite");
  }
  if (const auto d = root["design"]) {
    detail::only_keys(d, "design",
                      {"gamma_db", "sigma2_dbm", "r_max_dbm", "pt_per_antenna_db", "p_max_dbm", "n_rand", "iterations",
                       "tolerance"});
    maybe(d, "gamma_db", "design", c.gamma_db);
    maybe(d, "r_max_dbm", "design", c.r_max_dbm);
    maybe(d, "pt_per_antenna_db", "design", c.pt_per_antenna_db);
    double sigma2_dbm = units::mw_to_dbm(c.design.sigma2);
    double p_max_dbm = units::mw_to_dbm(c.design.p_max);
    maybe(d, "sigma2_dbm", "design", sigma2_dbm);
    maybe(d, "p_max_dbm", "design", p_max_dbm);
    if (!std::isfinite(sigma2_dbm) || !std::isfinite(p_max_dbm)) throw RangeError("every dB/dBm field must be finite");
    c.design.sigma2 = units::dbm_to_mw(sigma2_dbm);
    c.design.p_max = units::dbm_to_mw(p_max_dbm);
    maybe(d, "n_rand", "design", c.design.n_rand);
    maybe(d, "iterations", "design", c.design.max_iterations);
    maybe(d, "tolerance", "design", c.design.convergence_tolerance);
  }
  if (const auto s = root["sweep"]) {
    detail::only_keys(s, "sweep", {"variable", "values"});
    if (const auto v = s["variable"]) {
      try {
        c.sweep = parse_sweep_variable(detail::read<std::string>(v, "sweep.variable"));
      } catch (const ValidationError& e) {
        throw ParseError(e.what(), detail::line_of(v), "sweep.variable");
      }
      c.sweep_values = default_sweep_values(c.sweep, profile);
    }
    maybe(s, "values", "sweep", c.sweep_values);
  }
  maybe(root, "realizations", "", c.realizations);
  maybe(root, "seed", "", c.seed);
  maybe(root, "threads", "", c.threads);
  maybe(root, "output", "", c.output);
  if (const auto s = root["schemes"]) {
    c.schemes.clear();
    for (const auto& name : detail::read<std::vector<std::string>>(s, "schemes")) {
      try {
        c.schemes.push_back(opt::parse_scheme(name));
      } catch (const ValidationError& e) {
        throw ParseError(e.what(), detail::line_of(s), "schemes");
      }
    }
  }
  c.refresh();
  c.validate();
  return c;
}

inline SimulationConfig load_config(const std::string& path, Profile profile = Profile::Paper) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), profile);
}

/// Apply one sweep point to copies of the design inputs.
inline void apply_sweep(SweepVariable v, double value, const SimulationConfig& base, DesignConfig& cfg,
                        HybridRisSpec& spec) {
  cfg = base.design;
  spec = base.spec;
  switch (v) {
    case SweepVariable::Pt:
      cfg.p_t = static_cast<double>(base.geometry.antennas) * units::db_to_linear(value);
      break;
    case SweepVariable::Eta:
      spec.eta = units::amplitude_from_power_db(value);
      break;
    case SweepVariable::L:
      spec.active = static_cast<Eigen::Index>(value);
      break;
    case SweepVariable::Gamma:
      cfg.gamma = units::db_to_linear(value);
      break;
  }
}

}  // namespace hris::harness
