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

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qsl/geometry.hpp"
#include "qsl/ingest.hpp"
#include "qsl/types.hpp"

namespace qsl {

/// Fig.-style parameter presets; -sim entries carry the published
/// simulation fits, -meas entries the directly measured relaxation times.
struct Preset {
  std::string name;
  double concentration_mM = 0.0;
  RelaxationParams params;
  double x0 = 0.0;
  double z0 = 0.0;
};

const std::vector<Preset>& presets();
const Preset& find_preset(const std::string& name);

struct RunConfig {
  RelaxationParams params{7.1e-3, 38.55e-3, 209.1};
  double x0 = 0.70710678118654752;
  double z0 = 0.70710678118654752;
  double t_max = 0.15;
  int n_points = 2000;
  double quad_rel_tol = 1e-9;
  double quad_abs_tol = 1e-12;
  int smooth_window = 11;
  int smooth_degree = 3;
  double crossover_noise_floor = 1e-4;
  double revival_threshold = 1e-3;
  std::string output_dir = ".";
  double trotter_dt = 1e-5;

  void validate() const;
  QuadratureOptions quadrature() const;
  void apply_preset(const Preset& preset);
};

/// Parses a RunConfig JSON file; keys absent from the file keep the
/// values already present in `base`.
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

/// Writes sx.csv (closed form), sx_trotter.csv (Kraus oracle) and
/// coherence.csv into the output directory.
int run_simulate(const RunConfig& config);

/// Running-endpoint delta curves, crossover list and markovianity verdict;
/// writes delta_qfi.csv, delta_wy.csv, delta_diff.csv and report.json.
/// With an input file the data path (smooth, rescale to x0, trapezoid) is
/// used instead of the closed-form model.
int run_analyze(const RunConfig& config,
                const std::optional<std::filesystem::path>& input);

struct FitRequest {
  std::string model = "xi";  ///< "xi" or "expcos"
  std::optional<double> fix_j;
  std::optional<double> amplitude;
  std::optional<double> t1h;
  std::optional<double> t2c;
  std::optional<double> j;
  std::optional<double> m0;
  std::optional<double> omega;
};

/// Fits the requested model to the input series; prints the FitResult
/// JSON to stdout and writes fit.json. On FitError the best-so-far result
/// is dumped before rethrowing.
int run_fit(const RunConfig& config, const std::filesystem::path& input,
            const FitRequest& request);

/// Analyzes each preset concurrently and writes sweep_summary.csv (sorted
/// by concentration) plus relaxivity.json when at least two distinct
/// concentrations are present. A failing preset is marked failed in the
/// summary without aborting the sweep.
int run_sweep(const RunConfig& base, const std::vector<std::string>& names,
              int jobs);

/// Maps toolkit exceptions onto the documented CLI exit codes
/// (2 configuration, 3 data, 4 convergence).
int exit_code_for(const std::exception& error);

}  // namespace qsl
