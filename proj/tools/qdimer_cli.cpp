// qdimer_cli.cpp - command line front end: run, sweep, compare, validate.
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

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "qdimer/qdimer.hpp"

namespace {

// Exit codes: 0 success, 1 validation or config error, 2 numerical failure,
// 3 sweep finished with some failed points.
constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitPartialSweep = 3;

struct CommonOpts {
  std::string config_path;
  std::string preset;
  std::string out;
  std::string propagator;
  std::vector<std::string> sets;
};

void add_common_options(CLI::App* cmd, CommonOpts* opts) {
  cmd->add_option("-c,--config", opts->config_path, "Config file (INI-style)")
      ->check(CLI::ExistingFile);
  cmd->add_option("-p,--preset", opts->preset, "Scenario preset")
      ->check(CLI::IsMember({"main", "one_reservoir", "dicke", "local",
                             "detuning_sweep", "custom"}));
  cmd->add_option("-o,--out", opts->out,
                  "Output directory (overrides config and QDIMER_OUT)");
  cmd->add_option("--propagator", opts->propagator, "Propagator backend")
      ->check(CLI::IsMember({"spectral", "rk"}));
  cmd->add_option("--set", opts->sets, "Override any config key, e.g. --set coupling=0.2")
      ->allow_extra_args(false);
}

std::string read_config_file(const std::string& path) {
  if (path.empty()) return "";
  std::ifstream in(path, std::ios::binary);
  if (!in) throw qdimer::ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

qdimer::ScenarioConfig build_config(const CommonOpts& opts) {
  qdimer::ScenarioConfig cfg =
      qdimer::parse_config(read_config_file(opts.config_path), opts.preset, opts.sets);
  if (opts.propagator == "spectral") cfg.propagator = qdimer::PropagatorChoice::spectral;
  else if (opts.propagator == "rk") cfg.propagator = qdimer::PropagatorChoice::rk;
  cfg.out_dir = qdimer::resolve_out_dir(opts.out, cfg.out_dir);
  return cfg;
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const std::string& w : warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
}

int cmd_run(const CommonOpts& opts) {
  const qdimer::ScenarioConfig cfg = build_config(opts);
  const qdimer::RunResult res = qdimer::run_scenario(cfg);
  print_warnings(res.warnings);
  if (!res.trajectory.note.empty())
    std::fprintf(stderr, "note: %s\n", res.trajectory.note.c_str());
  std::printf("run: preset=%s propagator=%s points=%zu\n", to_string(cfg.preset),
              to_string(res.trajectory.provenance), res.records.size());
  for (const std::string& f : res.files) std::printf("wrote %s\n", f.c_str());
  return kExitOk;
}

int cmd_sweep(const CommonOpts& opts, int jobs) {
  const qdimer::ScenarioConfig cfg = build_config(opts);
  const qdimer::SweepResult res = qdimer::sweep_detuning(cfg, jobs);
  std::printf("sweep: %zu detunings x %zu times, %d failed\n", res.detunings.size(),
              res.times.size(), res.failed);
  for (std::size_t i = 0; i < res.errors.size(); ++i)
    if (!res.errors[i].empty())
      std::fprintf(stderr, "point %zu (detuning %.6e) failed: %s\n", i,
                   res.detunings[i], res.errors[i].c_str());
  for (const std::string& f : res.files) std::printf("wrote %s\n", f.c_str());
  if (res.failed == static_cast<int>(res.detunings.size())) return kExitNumerical;
  return res.failed > 0 ? kExitPartialSweep : kExitOk;
}

int cmd_compare(const CommonOpts& opts) {
  const qdimer::ScenarioConfig cfg = build_config(opts);
  const qdimer::CompareResult res = qdimer::compare_full_vs_reduced(cfg);
  std::printf("max population residual (full vs rates): %.6e (tolerance 1e-06)\n",
              res.max_population_residual);
  std::printf("fitted decay rate (full):  %.6e\n", res.fit_full.gamma);
  std::printf("fitted decay rate (rates): %.6e\n", res.fit_rates.gamma);
  std::printf("analytic decay rate:       %.6e\n", res.analytic_decay_rate);
  std::printf("analytic tail valid from t >= %.6e\n", res.validity_start);
  std::printf("entanglement lifetime (full): %.6e\n", res.fit_full.t_ent);
  std::printf("%s rates residual\n", res.pass_rates_residual ? "PASS" : "FAIL");
  std::printf("%s lifetime within 10%% of analytic\n", res.pass_lifetime ? "PASS" : "FAIL");
  for (const std::string& f : res.files) std::printf("wrote %s\n", f.c_str());
  return res.pass_rates_residual && res.pass_lifetime ? kExitOk : kExitNumerical;
}

int cmd_validate(const CommonOpts& opts) {
  const qdimer::ScenarioConfig cfg = build_config(opts);
  const std::vector<std::string> warnings = cfg.params.validate();
  nlohmann::json j = qdimer::detail::manifest_base(cfg, "validate");
  j.erase("generated_at");  // keep validate output deterministic
  j["sweep"] = {{"parameter", cfg.sweep.parameter},
                {"min", cfg.sweep.min},
                {"max", cfg.sweep.max},
                {"steps", cfg.sweep.steps}};
  j["out_dir"] = cfg.out_dir;
  j["warnings"] = warnings;
  std::printf("%s\n", j.dump(2).c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dissipative two-qubit dimer: master equation runs, detuning sweeps "
               "and rate model comparison"};
  app.set_version_flag("--version", qdimer::kToolVersion);
  app.require_subcommand(1);

  CommonOpts opts;
  int jobs = 1;
  CLI::App* run = app.add_subcommand("run", "Propagate one scenario and write tables");
  CLI::App* sweep = app.add_subcommand("sweep", "Sweep the detuning, tabulate concurrence");
  CLI::App* compare =
      app.add_subcommand("compare", "Cross-validate against the reduced rate model");
  CLI::App* validate =
      app.add_subcommand("validate", "Parse, validate and print the resolved config");
  for (CLI::App* cmd : {run, sweep, compare, validate}) add_common_options(cmd, &opts);
  sweep->add_option("-j,--jobs", jobs, "Worker threads for sweep points")
      ->check(CLI::Range(1, 64));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (run->parsed()) return cmd_run(opts);
    if (sweep->parsed()) return cmd_sweep(opts, jobs);
    if (compare->parsed()) return cmd_compare(opts);
    if (validate->parsed()) return cmd_validate(opts);
  } catch (const qdimer::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "invalid parameters: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumerical;
  }
  return kExitConfig;
}
