// Copyright 2026 The qsl-toolkit authors
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

#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qsl/cli.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::string preset;
  std::string out_dir;
  double t_max = 0.0;
  int points = 0;
  double noise_floor = -1.0;
  double x0 = 0.0, z0 = 0.0;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "JSON config file");
  cmd->add_option("--out", flags.out_dir, "output directory");
  cmd->add_option("--t-max", flags.t_max, "evolution window [s]");
  cmd->add_option("--points", flags.points, "grid points");
}

bool has_flag(const CLI::App* cmd, const std::string& name) {
  const CLI::Option* opt = cmd->get_option_no_throw(name);
  return opt != nullptr && opt->count() > 0;
}

/// Resolution order: defaults < QSL_OUT_DIR < config file < flags.
qsl::RunConfig resolve_config(const CLI::App* cmd, const CommonFlags& flags) {
  qsl::RunConfig config;
  if (const char* env = std::getenv("QSL_OUT_DIR")) config.output_dir = env;
  if (has_flag(cmd, "--config"))
    config = qsl::load_config(flags.config_path, config);
  if (has_flag(cmd, "--preset"))
    config.apply_preset(qsl::find_preset(flags.preset));
  if (has_flag(cmd, "--out")) config.output_dir = flags.out_dir;
  if (has_flag(cmd, "--t-max")) config.t_max = flags.t_max;
  if (has_flag(cmd, "--points")) config.n_points = flags.points;
  if (has_flag(cmd, "--noise-floor"))
    config.crossover_noise_floor = flags.noise_floor;
  if (has_flag(cmd, "--x0")) config.x0 = flags.x0;
  if (has_flag(cmd, "--z0")) config.z0 = flags.z0;
  return config;
}

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Qubit relaxation dynamics and geometric quantum-speed-limit toolkit"};
  app.require_subcommand(1);

  CommonFlags sim_flags, ana_flags, fit_flags, sweep_flags;
  double trotter_dt = 0.0;

  CLI::App* sim = app.add_subcommand("simulate",
                                     "closed-form and Kraus-oracle evolution");
  sim->add_option("--preset", sim_flags.preset, "parameter preset name");
  add_common(sim, sim_flags);
  sim->add_option("--trotter-dt", trotter_dt, "oracle step [s]");

  CLI::App* ana = app.add_subcommand(
      "analyze", "delta curves, crossovers and markovianity verdict");
  ana->add_option("--preset", ana_flags.preset, "parameter preset name");
  add_common(ana, ana_flags);
  std::string input_file;
  int smooth_window = 0, smooth_degree = 0;
  ana->add_option("--input", input_file, "measured series CSV");
  ana->add_option("--smooth-window", smooth_window, "smoothing window (odd)");
  ana->add_option("--smooth-degree", smooth_degree, "smoothing degree");
  ana->add_option("--noise-floor", ana_flags.noise_floor,
                  "crossover suppression floor");
  ana->add_option("--x0", ana_flags.x0, "initial <sx>");
  ana->add_option("--z0", ana_flags.z0, "initial <sz>");

  CLI::App* fit = app.add_subcommand("fit", "relaxation-model fits");
  std::string fit_input, fit_model = "xi";
  qsl::FitRequest request;
  double fix_j = 0.0, g_amp = 0.0, g_t1h = 0.0, g_t2c = 0.0, g_j = 0.0,
         g_m0 = 0.0, g_omega = 0.0;
  fit->add_option("--input", fit_input, "series CSV")->required();
  fit->add_option("--model", fit_model, "xi | expcos");
  fit->add_option("--fix-j", fix_j, "freeze J at this value [Hz]");
  fit->add_option("--amplitude", g_amp, "xi amplitude guess");
  fit->add_option("--t1h", g_t1h, "T1H guess [s]");
  fit->add_option("--t2c", g_t2c, "T2C guess [s]");
  fit->add_option("--j", g_j, "J guess [Hz]");
  fit->add_option("--m0", g_m0, "expcos amplitude guess");
  fit->add_option("--omega", g_omega, "expcos frequency guess [rad/s]");
  add_common(fit, fit_flags);

  CLI::App* sweep = app.add_subcommand("sweep", "per-preset QSL summary");
  std::string preset_list;
  int jobs = 0;
  sweep->add_option("--presets", preset_list, "comma-separated preset names")
      ->required();
  sweep->add_option("--jobs", jobs, "worker threads (default: processors)");
  add_common(sweep, sweep_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;  // usage problems are configuration errors
  }

  try {
    if (sim->parsed()) {
      qsl::RunConfig config = resolve_config(sim, sim_flags);
      if (sim->count("--trotter-dt")) config.trotter_dt = trotter_dt;
      return qsl::run_simulate(config);
    }
    if (ana->parsed()) {
      qsl::RunConfig config = resolve_config(ana, ana_flags);
      if (ana->count("--smooth-window")) config.smooth_window = smooth_window;
      if (ana->count("--smooth-degree")) config.smooth_degree = smooth_degree;
      std::optional<std::filesystem::path> input;
      if (ana->count("--input")) input = input_file;
      return qsl::run_analyze(config, input);
    }
    if (fit->parsed()) {
      qsl::RunConfig config = resolve_config(fit, fit_flags);
      request.model = fit_model;
      if (fit->count("--fix-j")) request.fix_j = fix_j;
      if (fit->count("--amplitude")) request.amplitude = g_amp;
      if (fit->count("--t1h")) request.t1h = g_t1h;
      if (fit->count("--t2c")) request.t2c = g_t2c;
      if (fit->count("--j")) request.j = g_j;
      if (fit->count("--m0")) request.m0 = g_m0;
      if (fit->count("--omega")) request.omega = g_omega;
      return qsl::run_fit(config, fit_input, request);
    }
    if (sweep->parsed()) {
      qsl::RunConfig config = resolve_config(sweep, sweep_flags);
      return qsl::run_sweep(config, split_list(preset_list), jobs);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return qsl::exit_code_for(e);
  }
  return 0;
}
