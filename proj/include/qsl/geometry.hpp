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

#include <vector>

#include "qsl/quadrature.hpp"
#include "qsl/series.hpp"
#include "qsl/types.hpp"

namespace qsl {

enum class MetricKind { kQfi, kWy };

const char* metric_name(MetricKind metric);

/// Quantum Fisher information metric factor (1 - z0^2)/(1 - x^2 - z0^2).
/// Throws SingularityError at or beyond the Bloch boundary x^2 + z0^2 >= 1.
double h_qfi(double x_t, double z0);

/// Wigner-Yanase metric factor. Throws DegenerateError at the maximally
/// mixed point x = z0 = 0 and SingularityError at the boundary.
double h_wy(double x_t, double z0);

/// Uhlmann fidelity of (x0, 0, z0) and (xt, 0, z0); in [0, 1], 1 iff equal.
double fidelity(double x0, double xt, double z0);

/// Quantum affinity tr(sqrt(rho0) sqrt(rho_t)); in [0, 1], 1 iff equal.
double affinity(double x0, double xt, double z0);

/// arccos with the argument clamped into [-1, 1] when it is within 1e-12
/// outside; larger excursions throw DomainError.
double checked_acos(double value);

/// Bures angle arccos(sqrt(F)) for QFI, Hellinger angle arccos(A) for WY.
double geodesic_length(double x0, double xt, double z0, MetricKind metric);

/// delta = (ell - L)/L. Throws DegenerateError when L <= min_geodesic.
double relative_deviation(double ell, double geodesic,
                          double min_geodesic = 1e-9);

struct QuadratureOptions {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  int max_subdivisions = 2000;
  /// Grid density for bracketing zeros of xi' (points per 1/J).
  double kink_scan_per_period = 2000.0;
  /// Purity margin 1 - x^2 - z0^2 below which the sqrt substitution is
  /// applied at a piece endpoint.
  double singular_threshold = 0.01;
};

struct PathLengthResult {
  double value = 0.0;
  double error = 0.0;  ///< summed quadrature error estimate
};

/// Path length (1/2) int_{t0}^{t1} sqrt(h_t) |d<sx>_t/dt| dt along the
/// model evolution x(t) = xi(t) x0 with z0 fixed. The integral is split at
/// every zero of xi' (kinks of the absolute value) and evaluated by
/// adaptive Gauss-Kronrod quadrature with a u = sqrt(t - t_sing)
/// substitution on pieces whose endpoint approaches the Bloch boundary,
/// where the integrand has an integrable 1/sqrt singularity.
PathLengthResult path_length(const RelaxationParams& p, const BlochVector& b0,
                             MetricKind metric, double t0, double t1,
                             const QuadratureOptions& opts = {});

/// Cumulative model path lengths: result[i] = ell(times[0], times[i]).
/// times must be strictly increasing with times[0] >= 0.
std::vector<double> cumulative_path_length(const RelaxationParams& p,
                                           const BlochVector& b0,
                                           MetricKind metric,
                                           const std::vector<double>& times,
                                           const QuadratureOptions& opts = {});

/// Data path: the sampled series is differentiated by central differences
/// (one-sided at the ends) and integrated by the trapezoid rule. Samples
/// lying on the Bloch boundary (purity margin within 1e-12 of zero) get a
/// sqrt-corrected cell; margins below -1e-12 raise DataError.
std::vector<double> cumulative_path_length(const TimeSeries& sx, double z0,
                                           MetricKind metric);

/// Data-path length over [t0, t1]; samples must cover the interval.
double path_length(const TimeSeries& sx, double z0, MetricKind metric,
                   double t0, double t1);

/// Smallest t* in (0, tau] with ell(0, t*) >= L(rho_0, rho_tau), located by
/// bisection on the monotone cumulative length. Equals tau when the
/// evolution is geodesic. Throws DegenerateError when L is numerically 0.
double qsl_time(const RelaxationParams& p, const BlochVector& b0, double tau,
                MetricKind metric, const QuadratureOptions& opts = {});

struct TighterInterval {
  double t_begin = 0.0;
  double t_end = 0.0;
  MetricKind tighter = MetricKind::kWy;
};

struct CrossoverResult {
  std::vector<double> times;
  std::vector<TighterInterval> timeline;
};

/// Sign changes of d(t) = delta_qfi - delta_wy located by linear
/// interpolation between samples classified against the noise floor;
/// excursions that never leave [-floor, floor] are suppressed. NaN samples
/// (degenerate early grid points) are ignored. d > 0 means WY assigns the
/// tighter QSL.
CrossoverResult crossover_times(const TimeSeries& delta_qfi,
                                const TimeSeries& delta_wy,
                                double noise_floor = 1e-4);

struct MetricReport {
  double path_length = 0.0;
  double geodesic_length = 0.0;
  double delta = 0.0;
};

struct QslReport {
  MetricReport qfi;
  MetricReport wy;
  std::vector<double> crossover_times;
  std::vector<TighterInterval> tighter_timeline;

  /// Checks ell >= L - quadrature_tol and delta consistency to 1e-12.
  void validate(double quadrature_tol) const;
};

}  // namespace qsl
