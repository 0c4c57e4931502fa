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

#include <Eigen/Dense>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "qsl/errors.hpp"
#include "qsl/series.hpp"
#include "qsl/types.hpp"

namespace qsl {

enum class SeriesFormat { kCsv };

/// Named fit parameters (ordered, matching the covariance rows), residual
/// RMS and the parameter covariance.
struct FitResult {
  std::vector<std::string> names;
  Eigen::VectorXd values;
  double residual_rms = 0.0;
  Eigen::MatrixXd covariance;
  bool converged = false;
  int iterations = 0;
  std::vector<double> residual_history;
  /// Parameters that collapsed to the edge of the sane range.
  std::vector<std::string> bound_flags;

  double param(const std::string& name) const;
  std::string to_json() const;
};

/// Fit failed to converge; carries the best-so-far result.
class FitError : public ConvergenceError {
 public:
  FitError(const std::string& what, FitResult best)
      : ConvergenceError(what), best_so_far(std::move(best)) {}
  FitResult best_so_far;
};

/// Reads `t_s,value` CSV (UTF-8, '#' comments, arbitrary row order; rows
/// are sorted on load and duplicate time stamps rejected).
TimeSeries load_series(const std::filesystem::path& path,
                       SeriesFormat format = SeriesFormat::kCsv);

/// Writes the same schema at 17 significant digits; load_series is the
/// exact inverse on the emitted file.
void write_series(const TimeSeries& series, const std::filesystem::path& path);

/// Values divided by reference; the label is annotated.
TimeSeries normalize(const TimeSeries& series, double reference);

/// Local least-squares polynomial smoothing (centered moving window,
/// asymmetric windows at the ends). Exact on polynomials up to `degree`,
/// also on non-uniform grids. window must be odd, >= 5 and <= length;
/// degree in [2, 4] and < window.
TimeSeries smooth(const TimeSeries& series, int window, int degree);

struct ExpCosGuess {
  double m0 = 1.0;
  double t2c = 0.1;    ///< [s], must be > 0
  double omega = 0.0;  ///< [rad/s]
};

/// Fits M0 e^{-t/T2C} cos(omega t). Parameters: m0, t2c, omega.
FitResult fit_exp_cos(const TimeSeries& series, const ExpCosGuess& guess);

struct XiModelGuess {
  double amplitude = 1.0;
  RelaxationParams params{7e-3, 40e-3, 209.1};
  bool fix_j = false;
  /// Optional frequency-offset nuisance factor cos(omega_offset t).
  bool fit_frequency_offset = false;
  double omega_offset = 0.0;
};

/// Fits amplitude * xi(t; T1H, T2C, J), J optionally frozen. Parameters:
/// amplitude, t1h, t2c [, j] [, omega_offset].
FitResult fit_xi_model(const TimeSeries& series, const XiModelGuess& guess);

/// Inversion-recovery null-time relation T1 = t_null / ln 2.
double t1_from_null(double t_null);

struct LineFit {
  double slope = 0.0;      ///< [1/(s mM)]
  double intercept = 0.0;  ///< [1/s]
  double r_squared = 0.0;
};

/// Ordinary least-squares line through (concentration [mM], rate [1/s])
/// pairs. Needs at least two distinct concentrations.
LineFit fit_relaxivity(std::span<const double> concentrations_mM,
                       std::span<const double> rates);

}  // namespace qsl
