// Flat key-value run configuration: typed keys, explicit units, strict
// parsing, and a serializer whose output reparses bit-identically.
#pragma once

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "spinbath/common.hpp"
#include "spinbath/observables.hpp"

namespace spinbath {

enum class Scenario { relax, catstate, entangle, verify };
enum class InitialState { displaced_gaussian, correlated_ground, cat_state };

inline std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::relax: return "relax";
    case Scenario::catstate: return "catstate";
    case Scenario::entangle: return "entangle";
    case Scenario::verify: return "verify";
  }
  return "relax";
}

inline std::string to_string(InitialState s) {
  switch (s) {
    case InitialState::displaced_gaussian: return "displaced-gaussian";
    case InitialState::correlated_ground: return "correlated-ground";
    case InitialState::cat_state: return "cat-state";
  }
  return "displaced-gaussian";
}

inline std::string to_string(BathSampling s) {
  return s == BathSampling::endpoints ? "endpoints" : "centers";
}

struct RunConfig {
  Scenario scenario = Scenario::relax;
  // system
  double well_depth = 0.018;
  double morse_alpha = 2.0;
  double mass = 1.0e5;
  // grid (defaults depend on the scenario)
  std::optional<double> grid_min;
  std::optional<double> grid_max;
  std::optional<std::size_t> grid_points;
  // bath
  int n_modes = 60;
  double omega_cutoff = 2.9e-3;
  std::optional<double> gamma_au;  // required: gamma or gamma_inv in files
  double kappa = 0.0;
  int n_exc = 2;
  BathSampling bath_sampling = BathSampling::endpoints;
  // initial state
  std::optional<InitialState> initial_state;
  std::optional<double> displacement;
  std::optional<double> width;
  double cat_omega0 = 1.0e-3;
  double cat_delta = 0.5;
  double cat_p0 = 0.0;
  // time, stored in fs
  double t_final_fs = 2000.0;
  double dt_fs = 0.5;
  double sample_interval_fs = 1.0;
  double entanglement_interval_fs = 1.0;
  bool per_pair_output = false;
  // relaxation
  double imag_tau_step_au = 1.0;
  double imag_tolerance = 1e-10;
  // numerics
  double cheb_tolerance = 1e-12;
  bool deterministic = false;
  long seed = 0;
  std::optional<std::string> output_dir;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' ||
                        s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

inline double parse_number(std::string_view token, const std::string& key) {
  double v = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last)
    throw config_error("config: key '" + key + "' has a malformed number '" +
                       std::string(token) + "'");
  return v;
}

inline long parse_integer(std::string_view token, const std::string& key) {
  long v = 0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last)
    throw config_error("config: key '" + key + "' has a malformed integer '" +
                       std::string(token) + "'");
  return v;
}

// Splits "value [unit]" on whitespace.
inline std::pair<std::string_view, std::string_view> split_unit(
    std::string_view rest) {
  const std::size_t pos = rest.find_first_of(" \t");
  if (pos == std::string_view::npos) return {rest, {}};
  return {trim(rest.substr(0, pos)), trim(rest.substr(pos + 1))};
}

// Dimensioned value in atomic units; the unit token is mandatory.
inline double parse_au(std::string_view rest, const std::string& key) {
  const auto [value, unit] = split_unit(rest);
  if (unit != "au")
    throw config_error("config: key '" + key + "' needs the unit 'au'");
  return parse_number(value, key);
}

// Time value, canonicalized to the requested unit.
inline double parse_time_as_fs(std::string_view rest, const std::string& key) {
  const auto [value, unit] = split_unit(rest);
  const double v = parse_number(value, key);
  if (unit == "fs") return v;
  if (unit == "au") return au_to_fs(v);
  throw config_error("config: key '" + key + "' needs unit 'fs' or 'au'");
}

inline double parse_time_as_au(std::string_view rest, const std::string& key) {
  const auto [value, unit] = split_unit(rest);
  const double v = parse_number(value, key);
  if (unit == "au") return v;
  if (unit == "fs") return fs_to_au(v);
  throw config_error("config: key '" + key + "' needs unit 'fs' or 'au'");
}

inline double parse_plain(std::string_view rest, const std::string& key) {
  const auto [value, unit] = split_unit(rest);
  if (!unit.empty())
    throw config_error("config: key '" + key + "' takes no unit");
  return parse_number(value, key);
}

inline long parse_plain_integer(std::string_view rest,
                                const std::string& key) {
  const auto [value, unit] = split_unit(rest);
  if (!unit.empty())
    throw config_error("config: key '" + key + "' takes no unit");
  return parse_integer(value, key);
}

inline bool parse_bool(std::string_view rest, const std::string& key) {
  if (rest == "true") return true;
  if (rest == "false") return false;
  throw config_error("config: key '" + key + "' must be true or false");
}

}  // namespace detail

inline void validate_config(const RunConfig& cfg) {
  if (!cfg.gamma_au.has_value())
    throw config_error("config: one of gamma or gamma_inv is required");
  if (*cfg.gamma_au < 0.0)
    throw config_error("config: gamma must be nonnegative");
  if (cfg.n_modes < 1 || cfg.n_modes > 63)
    throw config_error("config: n_modes must be in [1, 63]");
  if (cfg.n_exc < 0 || cfg.n_exc > cfg.n_modes)
    throw config_error("config: n_exc must be in [0, n_modes]");
  if (!(cfg.well_depth > 0.0) || !(cfg.morse_alpha > 0.0) || !(cfg.mass > 0.0))
    throw config_error("config: system parameters must be positive");
  if (!(cfg.omega_cutoff > 0.0))
    throw config_error("config: omega_cutoff must be positive");
  if (!(cfg.t_final_fs > 0.0) || !(cfg.dt_fs > 0.0) ||
      !(cfg.sample_interval_fs > 0.0) || !(cfg.entanglement_interval_fs > 0.0))
    throw config_error("config: time parameters must be positive");
  if (!(cfg.imag_tau_step_au > 0.0) || !(cfg.imag_tolerance > 0.0))
    throw config_error("config: relaxation parameters must be positive");
  if (!(cfg.cheb_tolerance > 0.0) || cfg.cheb_tolerance >= 1.0)
    throw config_error("config: cheb_tolerance must lie in (0, 1)");
  if (cfg.grid_points.has_value()) {
    const std::size_t n = *cfg.grid_points;
    if (n < 2 || (n & (n - 1)) != 0)
      throw config_error("config: grid_points must be a power of two >= 2");
  }
  if (cfg.grid_min.has_value() != cfg.grid_max.has_value())
    throw config_error("config: grid_min and grid_max come as a pair");
  if (cfg.grid_min.has_value() && !(*cfg.grid_max > *cfg.grid_min))
    throw config_error("config: grid_max must exceed grid_min");
}

inline RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  std::set<std::string> seen;
  bool saw_gamma = false, saw_gamma_inv = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos)
      throw config_error("config: line " + std::to_string(line_no) +
                         " is not of the form key = value");
    const std::string key{detail::trim(line.substr(0, eq))};
    const std::string_view rest = detail::trim(line.substr(eq + 1));
    if (key.empty() || rest.empty())
      throw config_error("config: line " + std::to_string(line_no) +
                         " is missing a key or value");
    if (!seen.insert(key).second)
      throw config_error("config: duplicate key '" + key + "'");

    if (key == "scenario") {
      if (rest == "relax") cfg.scenario = Scenario::relax;
      else if (rest == "catstate") cfg.scenario = Scenario::catstate;
      else if (rest == "entangle") cfg.scenario = Scenario::entangle;
      else if (rest == "verify") cfg.scenario = Scenario::verify;
      else throw config_error("config: unknown scenario '" + std::string(rest) + "'");
    } else if (key == "well_depth") {
      cfg.well_depth = detail::parse_au(rest, key);
    } else if (key == "morse_alpha") {
      cfg.morse_alpha = detail::parse_au(rest, key);
    } else if (key == "mass") {
      cfg.mass = detail::parse_au(rest, key);
    } else if (key == "grid_min") {
      cfg.grid_min = detail::parse_au(rest, key);
    } else if (key == "grid_max") {
      cfg.grid_max = detail::parse_au(rest, key);
    } else if (key == "grid_points") {
      cfg.grid_points = static_cast<std::size_t>(
          detail::parse_plain_integer(rest, key));
    } else if (key == "n_modes") {
      cfg.n_modes = static_cast<int>(detail::parse_plain_integer(rest, key));
    } else if (key == "omega_cutoff") {
      cfg.omega_cutoff = detail::parse_au(rest, key);
    } else if (key == "gamma") {
      saw_gamma = true;
      cfg.gamma_au = detail::parse_au(rest, key);
    } else if (key == "gamma_inv") {
      saw_gamma_inv = true;
      const double inv_au = detail::parse_time_as_au(rest, key);
      if (!(inv_au > 0.0))
        throw config_error("config: gamma_inv must be positive");
      cfg.gamma_au = 1.0 / inv_au;
    } else if (key == "kappa") {
      cfg.kappa = detail::parse_au(rest, key);
    } else if (key == "n_exc") {
      cfg.n_exc = static_cast<int>(detail::parse_plain_integer(rest, key));
    } else if (key == "bath_sampling") {
      if (rest == "endpoints") cfg.bath_sampling = BathSampling::endpoints;
      else if (rest == "centers") cfg.bath_sampling = BathSampling::centers;
      else throw config_error("config: unknown bath_sampling '" +
                              std::string(rest) + "'");
    } else if (key == "initial_state") {
      if (rest == "displaced-gaussian")
        cfg.initial_state = InitialState::displaced_gaussian;
      else if (rest == "correlated-ground")
        cfg.initial_state = InitialState::correlated_ground;
      else if (rest == "cat-state")
        cfg.initial_state = InitialState::cat_state;
      else throw config_error("config: unknown initial_state '" +
                              std::string(rest) + "'");
    } else if (key == "displacement") {
      cfg.displacement = detail::parse_au(rest, key);
    } else if (key == "width") {
      cfg.width = detail::parse_au(rest, key);
    } else if (key == "cat_omega0") {
      cfg.cat_omega0 = detail::parse_au(rest, key);
    } else if (key == "cat_delta") {
      cfg.cat_delta = detail::parse_au(rest, key);
    } else if (key == "cat_p0") {
      cfg.cat_p0 = detail::parse_au(rest, key);
    } else if (key == "t_final") {
      cfg.t_final_fs = detail::parse_time_as_fs(rest, key);
    } else if (key == "dt") {
      cfg.dt_fs = detail::parse_time_as_fs(rest, key);
    } else if (key == "sample_interval") {
      cfg.sample_interval_fs = detail::parse_time_as_fs(rest, key);
    } else if (key == "entanglement_interval") {
      cfg.entanglement_interval_fs = detail::parse_time_as_fs(rest, key);
    } else if (key == "per_pair_output") {
      cfg.per_pair_output = detail::parse_bool(rest, key);
    } else if (key == "imag_tau_step") {
      cfg.imag_tau_step_au = detail::parse_time_as_au(rest, key);
    } else if (key == "imag_tolerance") {
      cfg.imag_tolerance = detail::parse_au(rest, key);
    } else if (key == "cheb_tolerance") {
      cfg.cheb_tolerance = detail::parse_plain(rest, key);
    } else if (key == "deterministic") {
      cfg.deterministic = detail::parse_bool(rest, key);
    } else if (key == "seed") {
      cfg.seed = detail::parse_plain_integer(rest, key);
    } else if (key == "output_dir") {
      cfg.output_dir = std::string(rest);
    } else {
      throw config_error("config: unknown key '" + key + "'");
    }
  }
  if (saw_gamma && saw_gamma_inv)
    throw config_error("config: gamma and gamma_inv are mutually exclusive");
  validate_config(cfg);
  return cfg;
}

inline RunConfig parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw config_error("config: cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

// Serialized form reparses to the same configuration, bit for bit; atomic
// unit equivalents of femtosecond keys ride along as comments.
inline std::string serialize_config(const RunConfig& cfg) {
  std::string out = "# resolved run configuration\n";
  const auto emit = [&out](const std::string& key, const std::string& value) {
    out += key + " = " + value + "\n";
  };
  const auto emit_au = [&](const std::string& key, double v) {
    emit(key, format_g17(v) + " au");
  };
  const auto emit_fs = [&](const std::string& key, double v) {
    emit(key, format_g17(v) + " fs");
    out += "# " + key + "_au = " + format_g17(fs_to_au(v)) + "\n";
  };
  emit("scenario", to_string(cfg.scenario));
  emit_au("well_depth", cfg.well_depth);
  emit_au("morse_alpha", cfg.morse_alpha);
  emit_au("mass", cfg.mass);
  if (cfg.grid_min) emit_au("grid_min", *cfg.grid_min);
  if (cfg.grid_max) emit_au("grid_max", *cfg.grid_max);
  if (cfg.grid_points) emit("grid_points", std::to_string(*cfg.grid_points));
  emit("n_modes", std::to_string(cfg.n_modes));
  emit_au("omega_cutoff", cfg.omega_cutoff);
  emit_au("gamma", cfg.gamma_au.value());
  if (cfg.gamma_au.value() > 0.0)
    out += "# gamma_inv_fs = " + format_g17(au_to_fs(1.0 / *cfg.gamma_au)) +
           "\n";
  emit_au("kappa", cfg.kappa);
  emit("n_exc", std::to_string(cfg.n_exc));
  emit("bath_sampling", to_string(cfg.bath_sampling));
  if (cfg.initial_state) emit("initial_state", to_string(*cfg.initial_state));
  if (cfg.displacement) emit_au("displacement", *cfg.displacement);
  if (cfg.width) emit_au("width", *cfg.width);
  emit_au("cat_omega0", cfg.cat_omega0);
  emit_au("cat_delta", cfg.cat_delta);
  emit_au("cat_p0", cfg.cat_p0);
  emit_fs("t_final", cfg.t_final_fs);
  emit_fs("dt", cfg.dt_fs);
  emit_fs("sample_interval", cfg.sample_interval_fs);
  emit_fs("entanglement_interval", cfg.entanglement_interval_fs);
  emit("per_pair_output", cfg.per_pair_output ? "true" : "false");
  emit("imag_tau_step", format_g17(cfg.imag_tau_step_au) + " au");
  emit_au("imag_tolerance", cfg.imag_tolerance);
  emit("cheb_tolerance", format_g17(cfg.cheb_tolerance));
  emit("deterministic", cfg.deterministic ? "true" : "false");
  emit("seed", std::to_string(cfg.seed));
  if (cfg.output_dir) emit("output_dir", *cfg.output_dir);
  return out;
}

}  // namespace spinbath
