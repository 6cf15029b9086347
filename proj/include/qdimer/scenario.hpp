// scenario.hpp - scenario configs, presets, runners and file emission.
//
// Copyright 2026 The qdimer authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "qdimer/channels.hpp"
#include "qdimer/errors.hpp"
#include "qdimer/evolve.hpp"
#include "qdimer/observables.hpp"
#include "qdimer/rate_model.hpp"
#include "qdimer/system.hpp"

namespace qdimer {

inline constexpr const char* kToolVersion = "1.0.0";

enum class Preset { main, one_reservoir, dicke, local, detuning_sweep, custom };
enum class PropagatorChoice { spectral, rk };

inline const char* to_string(Preset p) {
  switch (p) {
    case Preset::main: return "main";
    case Preset::one_reservoir: return "one_reservoir";
    case Preset::dicke: return "dicke";
    case Preset::local: return "local";
    case Preset::detuning_sweep: return "detuning_sweep";
    case Preset::custom: return "custom";
  }
  return "?";
}

inline const char* to_string(PropagatorChoice p) {
  return p == PropagatorChoice::spectral ? "spectral" : "rk";
}

inline Preset preset_from_string(const std::string& s, int line = 0) {
  if (s == "main") return Preset::main;
  if (s == "one_reservoir") return Preset::one_reservoir;
  if (s == "dicke") return Preset::dicke;
  if (s == "local") return Preset::local;
  if (s == "detuning_sweep") return Preset::detuning_sweep;
  if (s == "custom") return Preset::custom;
  throw ConfigError("unknown preset '" + s + "'", line);
}

struct GridSpec {
  double t_min = 1.0;
  double t_max = 1e10;
  double points_per_decade = 20.0;
  bool include_zero = false;
};

struct SweepSpec {
  std::string parameter = "detuning";
  double min = 0.0;
  double max = 0.05;  // 0.5 * default coupling
  int steps = 26;
};

struct ScenarioConfig {
  Preset preset = Preset::main;
  SystemParams params;
  GridSpec grid;
  SweepSpec sweep;
  PropagatorChoice propagator = PropagatorChoice::spectral;
  double rel_tol = 1e-10;
  std::string initial_state = "ee";
  std::string out_dir;  // empty = use environment default (see resolve_out_dir)
  std::set<std::string> explicit_keys;
};

inline Vector4 initial_ket(const std::string& name, int line = 0) {
  if (name == "ee") return ket_ee();
  if (name == "eg") return ket_eg();
  if (name == "ge") return ket_ge();
  if (name == "gg") return ket_gg();
  if (name == "s") return ket_sym();
  if (name == "as") return ket_asym();
  throw ConfigError("unknown initial_state '" + name + "' (expected one of "
                    "ee, eg, ge, gg, s, as)", line);
}

// ---------------------------------------------------------------------------
// Config grammar: '#' starts a comment, sections are [params], [run], [grid],
// [sweep], entries are 'key = value'. Keys are globally unique, so overrides
// from the command line are written without a section prefix.
// ---------------------------------------------------------------------------

namespace detail {

inline std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

inline const std::map<std::string, std::string>& config_key_sections() {
  static const std::map<std::string, std::string> table = {
      {"omega1", "params"},      {"omega2", "params"},
      {"coupling", "params"},    {"gamma_dp1", "params"},
      {"gamma_dp2", "params"},   {"gamma_rad", "params"},
      {"temp_dp", "params"},     {"temp_rad", "params"},
      {"preset", "run"},         {"initial_state", "run"},
      {"propagator", "run"},     {"rel_tol", "run"},
      {"out_dir", "run"},        {"t_min", "grid"},
      {"t_max", "grid"},         {"points_per_decade", "grid"},
      {"include_zero", "grid"},  {"parameter", "sweep"},
      {"min", "sweep"},          {"max", "sweep"},
      {"steps", "sweep"},
  };
  return table;
}

struct RawEntry {
  std::string section;
  std::string key;
  std::string value;
  int line = 0;
};

inline std::vector<RawEntry> tokenize_config(const std::string& text) {
  std::vector<RawEntry> entries;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("unterminated section header '" + line + "'", line_no);
      section = trim(line.substr(1, line.size() - 2));
      if (section != "params" && section != "run" && section != "grid" &&
          section != "sweep")
        throw ConfigError("unknown section '[" + section + "]'", line_no);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected 'key = value', got '" + line + "'", line_no);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("empty key", line_no);
    if (value.empty()) throw ConfigError("empty value for '" + key + "'", line_no);
    if (section.empty())
      throw ConfigError("key '" + key + "' appears before any [section]", line_no);
    const auto it = config_key_sections().find(key);
    if (it == config_key_sections().end())
      throw ConfigError("unknown key '" + key + "'", line_no);
    if (it->second != section)
      throw ConfigError("key '" + key + "' belongs to section [" + it->second + "]",
                        line_no);
    entries.push_back({section, key, value, line_no});
  }
  return entries;
}

inline double parse_double(const std::string& value, const std::string& key, int line) {
  char* end = nullptr;
  const double x = std::strtod(value.c_str(), &end);
  if (end == value.c_str() || *end != '\0' || !std::isfinite(x))
    throw ConfigError("value for '" + key + "' is not a finite number: '" + value + "'",
                      line);
  return x;
}

inline int parse_positive_int(const std::string& value, const std::string& key,
                              int line) {
  char* end = nullptr;
  const long x = std::strtol(value.c_str(), &end, 10);
  if (end == value.c_str() || *end != '\0' || x <= 0 || x > 1000000)
    throw ConfigError("value for '" + key + "' is not a positive integer: '" + value +
                      "'", line);
  return static_cast<int>(x);
}

inline bool parse_bool(const std::string& value, const std::string& key, int line) {
  if (value == "true") return true;
  if (value == "false") return false;
  throw ConfigError("value for '" + key + "' must be true or false: '" + value + "'",
                    line);
}

inline void apply_entry(ScenarioConfig& cfg, const RawEntry& e) {
  if (e.key == "preset") return;  // resolved before this pass
  if (e.key == "omega1") cfg.params.omega1 = parse_double(e.value, e.key, e.line);
  else if (e.key == "omega2") cfg.params.omega2 = parse_double(e.value, e.key, e.line);
  else if (e.key == "coupling") cfg.params.coupling = parse_double(e.value, e.key, e.line);
  else if (e.key == "gamma_dp1") {
    cfg.params.gamma_dp1 = parse_double(e.value, e.key, e.line);
    if ((cfg.preset == Preset::dicke || cfg.preset == Preset::one_reservoir) &&
        cfg.params.gamma_dp1 != 0.0)
      throw ConfigError("preset '" + std::string(to_string(cfg.preset)) +
                        "' forces gamma_dp1 = 0", e.line);
  } else if (e.key == "gamma_dp2") {
    cfg.params.gamma_dp2 = parse_double(e.value, e.key, e.line);
    if (cfg.preset == Preset::dicke && cfg.params.gamma_dp2 != 0.0)
      throw ConfigError("preset 'dicke' forces gamma_dp2 = 0", e.line);
  } else if (e.key == "gamma_rad") cfg.params.gamma_rad = parse_double(e.value, e.key, e.line);
  else if (e.key == "temp_dp") cfg.params.temp_dp = parse_double(e.value, e.key, e.line);
  else if (e.key == "temp_rad") cfg.params.temp_rad = parse_double(e.value, e.key, e.line);
  else if (e.key == "initial_state") {
    initial_ket(e.value, e.line);  // validates
    cfg.initial_state = e.value;
  } else if (e.key == "propagator") {
    if (e.value == "spectral") cfg.propagator = PropagatorChoice::spectral;
    else if (e.value == "rk") cfg.propagator = PropagatorChoice::rk;
    else throw ConfigError("propagator must be 'spectral' or 'rk'", e.line);
  } else if (e.key == "rel_tol") {
    cfg.rel_tol = parse_double(e.value, e.key, e.line);
    if (!(cfg.rel_tol >= 1e-12 && cfg.rel_tol <= 1e-4))
      throw ConfigError("rel_tol must lie in [1e-12, 1e-4]", e.line);
  } else if (e.key == "out_dir") cfg.out_dir = e.value;
  else if (e.key == "t_min") cfg.grid.t_min = parse_double(e.value, e.key, e.line);
  else if (e.key == "t_max") cfg.grid.t_max = parse_double(e.value, e.key, e.line);
  else if (e.key == "points_per_decade")
    cfg.grid.points_per_decade = parse_double(e.value, e.key, e.line);
  else if (e.key == "include_zero")
    cfg.grid.include_zero = parse_bool(e.value, e.key, e.line);
  else if (e.key == "parameter") {
    if (e.value != "detuning")
      throw ConfigError("only 'detuning' sweeps are supported", e.line);
    cfg.sweep.parameter = e.value;
  } else if (e.key == "min") cfg.sweep.min = parse_double(e.value, e.key, e.line);
  else if (e.key == "max") cfg.sweep.max = parse_double(e.value, e.key, e.line);
  else if (e.key == "steps") cfg.sweep.steps = parse_positive_int(e.value, e.key, e.line);
  else throw ConfigError("unknown key '" + e.key + "'", e.line);
}

}  // namespace detail

// Parses config text, applies the preset (command line override wins over a
// [run] preset entry) and then the explicit entries. `overrides` holds
// repeatable 'key=value' strings from the command line, applied last.
inline ScenarioConfig parse_config(const std::string& text,
                                   const std::string& preset_override = "",
                                   const std::vector<std::string>& overrides = {}) {
  std::vector<detail::RawEntry> entries = detail::tokenize_config(text);
  for (const std::string& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos)
      throw ConfigError("override must be key=value, got '" + o + "'");
    const std::string key = detail::trim(o.substr(0, eq));
    const std::string value = detail::trim(o.substr(eq + 1));
    const auto it = detail::config_key_sections().find(key);
    if (it == detail::config_key_sections().end())
      throw ConfigError("unknown key '" + key + "' in override '" + o + "'");
    entries.push_back({it->second, key, value, 0});
  }

  std::string preset_name = "main";
  int preset_line = 0;
  for (const detail::RawEntry& e : entries)
    if (e.key == "preset") {
      preset_name = e.value;
      preset_line = e.line;
    }
  if (!preset_override.empty()) {
    preset_name = preset_override;
    preset_line = 0;
  }

  ScenarioConfig cfg;
  cfg.preset = preset_from_string(preset_name, preset_line);

  // Preset-specific parameter forcing and grid defaults. Explicit keys may
  // override the grid but not the forced rates.
  switch (cfg.preset) {
    case Preset::dicke:
      cfg.params.gamma_dp1 = 0.0;
      cfg.params.gamma_dp2 = 0.0;
      cfg.grid = {1.0, 2e4, 20.0, false};  // dynamics are over by ~4/gamma_rad
      break;
    case Preset::one_reservoir:
      cfg.params.gamma_dp1 = 0.0;
      break;
    case Preset::detuning_sweep:
      cfg.grid = {1e2, 1e8, 10.0, false};
      break;
    default:
      break;
  }

  for (const detail::RawEntry& e : entries) {
    detail::apply_entry(cfg, e);
    cfg.explicit_keys.insert(e.key);
  }

  if (!(cfg.grid.t_min > 0.0))
    throw ConfigError("t_min must be > 0 (use include_zero to sample t = 0)");
  if (!(cfg.grid.t_max > cfg.grid.t_min)) throw ConfigError("t_max must exceed t_min");
  if (!(cfg.grid.points_per_decade > 0.0))
    throw ConfigError("points_per_decade must be > 0");
  if (!(cfg.sweep.max >= cfg.sweep.min)) throw ConfigError("sweep max must be >= min");
  return cfg;
}

inline std::string resolve_out_dir(const std::string& cli_value,
                                   const std::string& config_value) {
  if (!cli_value.empty()) return cli_value;
  if (!config_value.empty()) return config_value;
  if (const char* env = std::getenv("QDIMER_OUT"); env != nullptr && *env != '\0')
    return env;
  return "out";
}

// ---------------------------------------------------------------------------
// Execution
// ---------------------------------------------------------------------------

inline std::vector<double> scenario_times(const GridSpec& g) {
  std::vector<double> times = log_time_grid(g.t_min, g.t_max, g.points_per_decade);
  if (g.include_zero) times.insert(times.begin(), 0.0);
  return times;
}

// Channel set and propagator selection shared by run, sweep and compare.
inline Trajectory propagate_scenario(const ScenarioConfig& cfg, const SystemParams& p,
                                     const DensityMatrix& rho0,
                                     const std::vector<double>& times) {
  const Matrix4 h = build_hamiltonian(p);
  const std::vector<JumpChannel> channels =
      cfg.preset == Preset::local ? local_jump_channels(p) : global_jump_channels(p);
  if (cfg.propagator == PropagatorChoice::rk)
    return rk_propagate(h, channels, rho0, times, cfg.rel_tol);
  return spectral_propagate(h, channels, rho0, times);
}

namespace detail {

inline void append_scientific(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  out += buf;
}

inline void write_file_atomic(const std::filesystem::path& path,
                              const std::string& content) {
  std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
    out << content;
    if (!out.flush())
      throw std::runtime_error("short write to '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

inline std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Deterministic '#' comment block with the fully resolved configuration;
// keeps CSV bodies byte-identical across reruns.
inline std::string config_comment_block(const ScenarioConfig& cfg) {
  std::string s;
  s += "# preset=" + std::string(to_string(cfg.preset));
  s += " propagator=" + std::string(to_string(cfg.propagator));
  s += " initial_state=" + cfg.initial_state + "\n# ";
  const std::pair<const char*, double> entries[] = {
      {"omega1", cfg.params.omega1},       {"omega2", cfg.params.omega2},
      {"coupling", cfg.params.coupling},   {"gamma_dp1", cfg.params.gamma_dp1},
      {"gamma_dp2", cfg.params.gamma_dp2}, {"gamma_rad", cfg.params.gamma_rad},
      {"temp_dp", cfg.params.temp_dp},     {"temp_rad", cfg.params.temp_rad},
  };
  bool sep = false;
  for (const auto& [key, value] : entries) {
    if (sep) s += " ";
    s += std::string(key) + "=";
    append_scientific(s, value);
    sep = true;
  }
  s += "\n";
  return s;
}

inline nlohmann::json params_json(const SystemParams& p) {
  return {{"omega1", p.omega1},       {"omega2", p.omega2},
          {"coupling", p.coupling},   {"gamma_dp1", p.gamma_dp1},
          {"gamma_dp2", p.gamma_dp2}, {"gamma_rad", p.gamma_rad},
          {"temp_dp", p.temp_dp},     {"temp_rad", p.temp_rad}};
}

inline nlohmann::json manifest_base(const ScenarioConfig& cfg, const std::string& command) {
  nlohmann::json j;
  j["tool_version"] = kToolVersion;
  j["generated_at"] = utc_timestamp();
  j["command"] = command;
  j["preset"] = to_string(cfg.preset);
  j["propagator_requested"] = to_string(cfg.propagator);
  j["initial_state"] = cfg.initial_state;
  j["rel_tol"] = cfg.rel_tol;
  j["params"] = params_json(cfg.params);
  j["grid"] = {{"t_min", cfg.grid.t_min},
               {"t_max", cfg.grid.t_max},
               {"points_per_decade", cfg.grid.points_per_decade},
               {"include_zero", cfg.grid.include_zero}};
  return j;
}

}  // namespace detail

struct RunResult {
  std::string out_dir;
  Trajectory trajectory;
  std::vector<ObservableRecord> records;
  std::vector<std::string> warnings;
  std::vector<std::string> files;
};

// Runs one scenario and writes trajectory.csv, plot_populations.dat,
// plot_entanglement.dat and manifest.json into the resolved output directory.
inline RunResult run_scenario(const ScenarioConfig& cfg) {
  RunResult res;
  res.warnings = cfg.params.validate();
  res.out_dir = resolve_out_dir("", cfg.out_dir);

  const std::vector<double> times = scenario_times(cfg.grid);
  const DensityMatrix rho0 = pure_state(initial_ket(cfg.initial_state));
  res.trajectory = propagate_scenario(cfg, cfg.params, rho0, times);
  res.records = observable_table(res.trajectory);

  const std::filesystem::path dir(res.out_dir);

  std::string csv = "# trajectory of the two-qubit master equation\n";
  csv += detail::config_comment_block(cfg);
  csv += "t,p_ee,p_s,p_as,p_gg,entropy,concurrence,trace_err,min_eig\n";
  std::string pop_dat = "# t p_ee p_s p_as p_gg\n";
  std::string ent_dat = "# t entropy concurrence\n";
  for (const ObservableRecord& r : res.records) {
    const double cols[] = {r.t,       r.p_ee,        r.p_s,       r.p_as, r.p_gg,
                           r.entropy, r.concurrence, r.trace_err, r.min_eig};
    bool sep = false;
    for (double v : cols) {
      if (sep) csv += ",";
      detail::append_scientific(csv, v);
      sep = true;
    }
    csv += "\n";
    for (int i = 0; i < 5; ++i) {
      if (i) pop_dat += " ";
      detail::append_scientific(pop_dat, cols[i]);
    }
    pop_dat += "\n";
    const double ent_cols[] = {r.t, r.entropy, r.concurrence};
    for (int i = 0; i < 3; ++i) {
      if (i) ent_dat += " ";
      detail::append_scientific(ent_dat, ent_cols[i]);
    }
    ent_dat += "\n";
  }

  nlohmann::json manifest = detail::manifest_base(cfg, "run");
  manifest["provenance"] = to_string(res.trajectory.provenance);
  manifest["propagator_note"] = res.trajectory.note;
  manifest["max_hermiticity_deviation"] = res.trajectory.max_hermiticity_deviation;
  manifest["warnings"] = res.warnings;
  manifest["files"] = {"trajectory.csv", "plot_populations.dat",
                       "plot_entanglement.dat"};

  detail::write_file_atomic(dir / "trajectory.csv", csv);
  detail::write_file_atomic(dir / "plot_populations.dat", pop_dat);
  detail::write_file_atomic(dir / "plot_entanglement.dat", ent_dat);
  detail::write_file_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
  res.files = {(dir / "trajectory.csv").string(), (dir / "plot_populations.dat").string(),
               (dir / "plot_entanglement.dat").string(),
               (dir / "manifest.json").string()};
  return res;
}

struct SweepResult {
  std::string out_dir;
  std::vector<double> detunings;
  std::vector<double> times;
  std::vector<std::vector<double>> concurrence;  // [detuning][time], NaN on failure
  std::vector<std::string> errors;               // aligned with detunings, "" if ok
  int failed = 0;
  std::vector<std::string> files;
};

// Sweeps the detuning omega1 - omega2 (omega2 stays fixed), recording the
// concurrence surface. Each point is independent; failures leave NaN cells
// and are reported, the sweep continues.
inline SweepResult sweep_detuning(const ScenarioConfig& cfg, int jobs = 1) {
  cfg.params.validate();
  SweepResult res;
  res.out_dir = resolve_out_dir("", cfg.out_dir);
  res.times = scenario_times(cfg.grid);

  const int n = cfg.sweep.steps;
  res.detunings.resize(n);
  for (int i = 0; i < n; ++i)
    res.detunings[i] =
        n == 1 ? cfg.sweep.min
               : cfg.sweep.min + (cfg.sweep.max - cfg.sweep.min) *
                                     (static_cast<double>(i) / (n - 1));
  res.concurrence.assign(n, std::vector<double>(
                                res.times.size(),
                                std::numeric_limits<double>::quiet_NaN()));
  res.errors.assign(n, "");

  const auto run_point = [&](int i) {
    try {
      SystemParams p = cfg.params;
      p.omega1 = cfg.params.omega2 + res.detunings[i];
      p.validate();
      const DensityMatrix rho0 = pure_state(initial_ket(cfg.initial_state));
      const Trajectory traj = propagate_scenario(cfg, p, rho0, res.times);
      for (std::size_t j = 0; j < res.times.size(); ++j)
        res.concurrence[i][j] = concurrence(traj.states[j]);
    } catch (const std::exception& e) {
      res.errors[i] = e.what();
    }
  };

  if (jobs <= 1) {
    for (int i = 0; i < n; ++i) run_point(i);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    const int workers = std::min(jobs, n);
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) run_point(i);
      });
    for (std::thread& th : pool) th.join();
  }
  for (const std::string& e : res.errors)
    if (!e.empty()) ++res.failed;

  // Matrix CSV: header row of times, one row per detuning.
  std::string csv = "# concurrence as a function of detuning (rows) and time (columns)\n";
  csv += detail::config_comment_block(cfg);
  csv += "detuning";
  for (double t : res.times) {
    csv += ",";
    detail::append_scientific(csv, t);
  }
  csv += "\n";
  std::string dat = "# detuning t concurrence\n";
  for (int i = 0; i < n; ++i) {
    detail::append_scientific(csv, res.detunings[i]);
    for (std::size_t j = 0; j < res.times.size(); ++j) {
      csv += ",";
      detail::append_scientific(csv, res.concurrence[i][j]);
      detail::append_scientific(dat, res.detunings[i]);
      dat += " ";
      detail::append_scientific(dat, res.times[j]);
      dat += " ";
      detail::append_scientific(dat, res.concurrence[i][j]);
      dat += "\n";
    }
    csv += "\n";
    dat += "\n";  // blank line between detuning blocks for gnuplot pm3d
  }

  nlohmann::json manifest = detail::manifest_base(cfg, "sweep");
  manifest["sweep"] = {{"parameter", cfg.sweep.parameter},
                       {"min", cfg.sweep.min},
                       {"max", cfg.sweep.max},
                       {"steps", cfg.sweep.steps}};
  manifest["failed_points"] = res.failed;
  nlohmann::json errors = nlohmann::json::array();
  for (int i = 0; i < n; ++i)
    if (!res.errors[i].empty())
      errors.push_back({{"index", i},
                        {"detuning", res.detunings[i]},
                        {"error", res.errors[i]}});
  manifest["errors"] = errors;
  manifest["files"] = {"sweep_concurrence.csv", "plot_sweep.dat"};

  const std::filesystem::path dir(res.out_dir);
  detail::write_file_atomic(dir / "sweep_concurrence.csv", csv);
  detail::write_file_atomic(dir / "plot_sweep.dat", dat);
  detail::write_file_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
  res.files = {(dir / "sweep_concurrence.csv").string(),
               (dir / "plot_sweep.dat").string(), (dir / "manifest.json").string()};
  return res;
}

struct CompareResult {
  std::string out_dir;
  std::vector<double> times;
  std::vector<double> p_as_full, p_as_rates, p_as_analytic;
  double max_population_residual = 0.0;  // all four populations, full vs rates
  double max_pas_residual = 0.0;         // p_as only
  double analytic_decay_rate = 0.0;
  double validity_start = 0.0;
  FitResult fit_full, fit_rates;
  bool pass_rates_residual = false;  // max_population_residual <= 1e-6
  bool pass_lifetime = false;        // fitted full rate within 10% of analytic
  std::vector<std::string> files;
};

// Cross-validates the full master equation against the reduced rate model
// and the analytic tail, starting from |ee><ee|.
inline CompareResult compare_full_vs_reduced(const ScenarioConfig& cfg) {
  check_rate_model_params(cfg.params);
  CompareResult res;
  res.out_dir = resolve_out_dir("", cfg.out_dir);
  res.times = scenario_times(cfg.grid);

  const DensityMatrix rho0 = pure_state(ket_ee());
  const Trajectory traj = propagate_scenario(cfg, cfg.params, rho0, res.times);
  const EigenBasis basis = eigen_system(cfg.params);

  const PopulationVector p0(1.0, 0.0, 0.0, 0.0);
  const std::vector<PopulationVector> rates = solve_rates(p0, res.times, cfg.params);

  const std::size_t nt = res.times.size();
  res.p_as_full.resize(nt);
  res.p_as_rates.resize(nt);
  res.p_as_analytic.resize(nt);
  for (std::size_t j = 0; j < nt; ++j) {
    const EigenPopulations ep = eigen_populations(traj.states[j], basis);
    const PopulationVector full(ep.p_ee, ep.p_plus, ep.p_minus, ep.p_gg);
    res.p_as_full[j] = ep.p_minus;
    res.p_as_rates[j] = rates[j](2);
    res.p_as_analytic[j] = analytic_pas(res.times[j], cfg.params).p_as;
    res.max_population_residual = std::max(
        res.max_population_residual, (full - rates[j]).cwiseAbs().maxCoeff());
    res.max_pas_residual =
        std::max(res.max_pas_residual, std::abs(res.p_as_full[j] - res.p_as_rates[j]));
  }

  const AnalyticTail tail = analytic_pas(0.0, cfg.params);
  res.analytic_decay_rate = tail.decay_rate;
  res.validity_start = tail.validity_start;
  res.fit_full = fit_exponential_tail(res.times, res.p_as_full);
  res.fit_rates = fit_exponential_tail(res.times, res.p_as_rates);
  res.pass_rates_residual = res.max_population_residual <= 1e-6;
  res.pass_lifetime = std::abs(res.fit_full.gamma - res.analytic_decay_rate) <=
                      0.1 * res.analytic_decay_rate;

  std::string csv = "# full master equation vs reduced rate model vs analytic tail\n";
  csv += detail::config_comment_block(cfg);
  csv += "t,p_as_full,p_as_rates,p_as_analytic,resid_rates,resid_analytic,analytic_valid\n";
  for (std::size_t j = 0; j < nt; ++j) {
    const double cols[] = {res.times[j],
                           res.p_as_full[j],
                           res.p_as_rates[j],
                           res.p_as_analytic[j],
                           std::abs(res.p_as_full[j] - res.p_as_rates[j]),
                           std::abs(res.p_as_full[j] - res.p_as_analytic[j])};
    for (double v : cols) {
      detail::append_scientific(csv, v);
      csv += ",";
    }
    csv += res.times[j] >= res.validity_start ? "1" : "0";
    csv += "\n";
  }

  nlohmann::json summary = detail::manifest_base(cfg, "compare");
  summary["provenance"] = to_string(traj.provenance);
  summary["max_population_residual"] = res.max_population_residual;
  summary["max_pas_residual"] = res.max_pas_residual;
  summary["analytic_decay_rate"] = res.analytic_decay_rate;
  summary["analytic_validity_start"] = res.validity_start;
  summary["fitted_gamma_full"] = res.fit_full.gamma;
  summary["fitted_gamma_rates"] = res.fit_rates.gamma;
  summary["fit_full"] = {{"gamma", res.fit_full.gamma},
                         {"t_ent", res.fit_full.t_ent},
                         {"r_squared", res.fit_full.r_squared},
                         {"plateau", res.fit_full.plateau},
                         {"t_start", res.fit_full.t_start},
                         {"t_end", res.fit_full.t_end},
                         {"points", res.fit_full.points}};
  summary["tolerances"] = {{"rates_residual", 1e-6}, {"lifetime_rel", 0.1}};
  summary["pass_rates_residual"] = res.pass_rates_residual;
  summary["pass_lifetime"] = res.pass_lifetime;
  summary["pass"] = res.pass_rates_residual && res.pass_lifetime;

  const std::filesystem::path dir(res.out_dir);
  detail::write_file_atomic(dir / "compare.csv", csv);
  detail::write_file_atomic(dir / "compare_summary.json", summary.dump(2) + "\n");
  res.files = {(dir / "compare.csv").string(),
               (dir / "compare_summary.json").string()};
  return res;
}

}  // namespace qdimer
