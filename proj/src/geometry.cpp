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

#include "qsl/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "qsl/dynamics.hpp"

namespace qsl {

namespace {

constexpr double kClampTol = 1e-12;

/// 1 - x^2 - z0^2, snapped to exactly 0 within a few ulps of purity (the
/// sqrt in Eqs.-style fidelity/affinity amplifies last-ulp fuzz of a pure
/// state to ~1e-8 otherwise); throws on a genuinely non-physical state.
double purity_margin(double x, double z0) {
  const double f = 1.0 - x * x - z0 * z0;
  if (f < -kClampTol)
    throw DomainError("state (x=" + std::to_string(x) +
                      ", z0=" + std::to_string(z0) + ") lies outside the Bloch ball");
  return f <= 1e-15 ? 0.0 : f;
}

// Metric factor for the path integrand. Takes a precomputed positive
// purity margin; the z0 == 0, x == 0 point uses the WY -> QFI reduction.
double metric_factor(double x, double z0, double margin, MetricKind metric) {
  if (metric == MetricKind::kQfi) return (1.0 - z0 * z0) / margin;
  const double r2 = x * x + z0 * z0;
  if (r2 == 0.0) return 1.0 / margin;  // limit of h_wy along z0 = 0
  return (x * x / margin + 2.0 * z0 * z0 / (1.0 + std::sqrt(margin))) / r2;
}

struct ModelPath {
  RelaxationParams p;
  double x0;
  double z0;
  MetricKind metric;

  double x_at(double t) const { return xi(t, p) * x0; }

  // Integrand of Eq-style path length: (1/2) sqrt(h_t) |dx/dt|.
  double integrand(double t) const {
    const double x = x_at(t);
    const double f = 1.0 - x * x - z0 * z0;
    if (f <= 0.0)
      throw DomainError("path_length: trajectory touched the Bloch boundary at t=" +
                        std::to_string(t));
    const double h = metric_factor(x, z0, f, metric);
    return 0.5 * std::sqrt(h) * std::abs(xi_derivative(t, p) * x0);
  }
};

/// Zeros of xi' in (t0, t1): sign changes on a uniform scan refined by
/// bisection.
std::vector<double> derivative_zeros(const RelaxationParams& p, double t0,
                                     double t1, double scan_per_period) {
  std::vector<double> zeros;
  const double span = t1 - t0;
  const long n = std::max<long>(64, std::lround(scan_per_period * span * p.j));
  double prev_t = t0;
  double prev_d = xi_derivative(prev_t, p);
  for (long i = 1; i <= n; ++i) {
    const double t = t0 + span * static_cast<double>(i) / static_cast<double>(n);
    const double d = xi_derivative(t, p);
    if ((prev_d < 0.0 && d > 0.0) || (prev_d > 0.0 && d < 0.0)) {
      double lo = prev_t, hi = t, dlo = prev_d;
      for (int it = 0; it < 80 && hi - lo > 1e-16 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double dm = xi_derivative(mid, p);
        if ((dlo < 0.0) == (dm < 0.0)) {
          lo = mid;
          dlo = dm;
        } else {
          hi = mid;
        }
      }
      zeros.push_back(0.5 * (lo + hi));
    } else if (d == 0.0 && t < t1) {
      zeros.push_back(t);
    }
    prev_t = t;
    prev_d = d;
  }
  return zeros;
}

/// Integral of the model integrand over a kink-free piece [a, b], with the
/// sqrt substitution applied from any endpoint whose purity margin is below
/// the singular threshold.
PathLengthResult integrate_piece(const ModelPath& path, double a, double b,
                                 const QuadratureOptions& opts) {
  PathLengthResult out;
  if (!(b - a > 0.0)) return out;
  const double fa = purity_margin(path.x_at(a), path.z0);
  const double fb = purity_margin(path.x_at(b), path.z0);
  const bool sing_a = fa < opts.singular_threshold;
  const bool sing_b = fb < opts.singular_threshold;

  auto plain = [&](double lo, double hi) {
    return integrate_adaptive([&](double t) { return path.integrand(t); }, lo,
                              hi, opts.rel_tol, opts.abs_tol,
                              opts.max_subdivisions);
  };
  auto sub_left = [&](double lo, double hi) {
    return integrate_adaptive(
        [&](double u) { return 2.0 * u * path.integrand(lo + u * u); }, 0.0,
        std::sqrt(hi - lo), opts.rel_tol, opts.abs_tol, opts.max_subdivisions);
  };
  auto sub_right = [&](double lo, double hi) {
    return integrate_adaptive(
        [&](double u) { return 2.0 * u * path.integrand(hi - u * u); }, 0.0,
        std::sqrt(hi - lo), opts.rel_tol, opts.abs_tol, opts.max_subdivisions);
  };

  QuadratureResult q;
  if (sing_a && sing_b) {
    const double mid = 0.5 * (a + b);
    const QuadratureResult ql = sub_left(a, mid);
    const QuadratureResult qr = sub_right(mid, b);
    out.value = ql.value + qr.value;
    out.error = ql.error + qr.error;
    return out;
  }
  if (sing_a)
    q = sub_left(a, b);
  else if (sing_b)
    q = sub_right(a, b);
  else
    q = plain(a, b);
  out.value = q.value;
  out.error = q.error;
  return out;
}

void check_model_inputs(const RelaxationParams& p, const BlochVector& b0) {
  p.validate();
  if (!b0.is_physical())
    throw DomainError("path_length: initial state outside the Bloch ball");
  if (std::abs(b0.y) > 1e-12)
    throw DomainError("path_length: states with <sy> != 0 are unsupported");
}

}  // namespace

const char* metric_name(MetricKind metric) {
  return metric == MetricKind::kQfi ? "QFI" : "WY";
}

double h_qfi(double x_t, double z0) {
  const double f = 1.0 - x_t * x_t - z0 * z0;
  if (f <= 0.0)
    throw SingularityError("h_qfi: diverges at the Bloch boundary (margin " +
                           std::to_string(f) + ")");
  return (1.0 - z0 * z0) / f;
}

double h_wy(double x_t, double z0) {
  const double r2 = x_t * x_t + z0 * z0;
  if (r2 == 0.0)
    throw DegenerateError("h_wy: undefined at the maximally mixed state");
  const double f = 1.0 - r2;
  if (f <= 0.0)
    throw SingularityError("h_wy: diverges at the Bloch boundary (margin " +
                           std::to_string(f) + ")");
  // 1 - sqrt(1-r^2) rewritten as r^2/(1 + sqrt(1-r^2)) to avoid
  // cancellation at small r.
  return (x_t * x_t / f + 2.0 * z0 * z0 / (1.0 + std::sqrt(f))) / r2;
}

double fidelity(double x0, double xt, double z0) {
  const double f0 = purity_margin(x0, z0);
  const double ft = purity_margin(xt, z0);
  return 0.5 * (1.0 + x0 * xt + z0 * z0 + std::sqrt(f0) * std::sqrt(ft));
}

double affinity(double x0, double xt, double z0) {
  const double f0 = purity_margin(x0, z0);
  const double ft = purity_margin(xt, z0);
  const double num =
      x0 * xt + z0 * z0 + (1.0 + std::sqrt(f0)) * (1.0 + std::sqrt(ft));
  // 1 - r evaluated as (1 - r^2)/(1 + r): exact for snapped-pure states
  // and free of cancellation.
  auto factor = [](double x, double z, double margin) {
    const double r = std::sqrt(x * x + z * z);
    return std::sqrt(1.0 + r) + std::sqrt(margin / (1.0 + r));
  };
  return num / (factor(x0, z0, f0) * factor(xt, z0, ft));
}

double checked_acos(double value) {
  if (value > 1.0 + kClampTol || value < -1.0 - kClampTol)
    throw DomainError("checked_acos: argument " + std::to_string(value) +
                      " outside [-1, 1] beyond tolerance");
  return std::acos(std::clamp(value, -1.0, 1.0));
}

double geodesic_length(double x0, double xt, double z0, MetricKind metric) {
  if (metric == MetricKind::kQfi)
    return checked_acos(std::sqrt(fidelity(x0, xt, z0)));
  return checked_acos(affinity(x0, xt, z0));
}

double relative_deviation(double ell, double geodesic, double min_geodesic) {
  if (!(geodesic > min_geodesic))
    throw DegenerateError("relative_deviation: geodesic length " +
                          std::to_string(geodesic) +
                          " is below the degeneracy floor");
  return (ell - geodesic) / geodesic;
}

PathLengthResult path_length(const RelaxationParams& p, const BlochVector& b0,
                             MetricKind metric, double t0, double t1,
                             const QuadratureOptions& opts) {
  check_model_inputs(p, b0);
  if (t0 < 0.0 || !(t0 < t1))
    throw DomainError("path_length: need 0 <= t0 < t1");
  if (b0.x == 0.0) return {};  // no coherence, zero-length path

  const ModelPath path{p, b0.x, b0.z, metric};
  std::vector<double> cuts = derivative_zeros(p, t0, t1, opts.kink_scan_per_period);
  cuts.push_back(t1);
  PathLengthResult total;
  double prev = t0;
  for (double cut : cuts) {
    if (cut - prev > 1e-15 * std::max(1.0, cut)) {
      const PathLengthResult piece = integrate_piece(path, prev, cut, opts);
      total.value += piece.value;
      total.error += piece.error;
    }
    prev = cut;
  }
  return total;
}

std::vector<double> cumulative_path_length(const RelaxationParams& p,
                                           const BlochVector& b0,
                                           MetricKind metric,
                                           const std::vector<double>& times,
                                           const QuadratureOptions& opts) {
  check_model_inputs(p, b0);
  if (times.size() < 2)
    throw DomainError("cumulative_path_length: need at least two times");
  if (times.front() < 0.0)
    throw DomainError("cumulative_path_length: times must be >= 0");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1]))
      throw DomainError("cumulative_path_length: times must be strictly increasing");

  std::vector<double> out(times.size(), 0.0);
  if (b0.x == 0.0) return out;

  const ModelPath path{p, b0.x, b0.z, metric};
  const std::vector<double> zeros =
      derivative_zeros(p, times.front(), times.back(), opts.kink_scan_per_period);

  double acc = 0.0;
  double prev = times.front();
  std::size_t zi = 0;
  for (std::size_t i = 1; i < times.size(); ++i) {
    const double target = times[i];
    while (zi < zeros.size() && zeros[zi] <= target) {
      if (zeros[zi] - prev > 1e-15 * std::max(1.0, target)) {
        acc += integrate_piece(path, prev, zeros[zi], opts).value;
        prev = zeros[zi];
      }
      ++zi;
    }
    if (target - prev > 1e-15 * std::max(1.0, target)) {
      acc += integrate_piece(path, prev, target, opts).value;
      prev = target;
    }
    out[i] = acc;
  }
  return out;
}

std::vector<double> cumulative_path_length(const TimeSeries& sx, double z0,
                                           MetricKind metric) {
  validate_series(sx, 2);
  const std::size_t n = sx.size();
  std::vector<double> g(n, 0.0);
  std::vector<bool> singular(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = sx.value[i];
    const double f = 1.0 - x * x - z0 * z0;
    if (f < -kClampTol)
      throw DataError("cumulative_path_length: sample " + std::to_string(i) +
                      " lies outside the Bloch ball; smooth or renormalize");
    if (f <= kClampTol) {
      singular[i] = true;
      continue;
    }
    double deriv;
    if (i == 0)
      deriv = (sx.value[1] - sx.value[0]) / (sx.t[1] - sx.t[0]);
    else if (i == n - 1)
      deriv = (sx.value[n - 1] - sx.value[n - 2]) / (sx.t[n - 1] - sx.t[n - 2]);
    else
      deriv = (sx.value[i + 1] - sx.value[i - 1]) / (sx.t[i + 1] - sx.t[i - 1]);
    g[i] = 0.5 * std::sqrt(metric_factor(x, z0, f, metric)) * std::abs(deriv);
  }

  std::vector<double> cum(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    const double dt = sx.t[i] - sx.t[i - 1];
    double cell;
    if (singular[i - 1] && singular[i])
      cell = 0.0;
    else if (singular[i - 1])
      cell = 2.0 * g[i] * dt;  // integrates c/sqrt(t - t[i-1]) exactly
    else if (singular[i])
      cell = 2.0 * g[i - 1] * dt;
    else
      cell = 0.5 * (g[i - 1] + g[i]) * dt;
    cum[i] = cum[i - 1] + cell;
  }
  return cum;
}

double path_length(const TimeSeries& sx, double z0, MetricKind metric,
                   double t0, double t1) {
  validate_series(sx, 2);
  if (!(t0 < t1)) throw DomainError("path_length: need t0 < t1");
  if (t0 < sx.t.front() - 1e-15 || t1 > sx.t.back() + 1e-15)
    throw DataError("path_length: samples do not cover [t0, t1]");
  const std::vector<double> cum = cumulative_path_length(sx, z0, metric);
  auto interp = [&](double t) {
    const auto it = std::lower_bound(sx.t.begin(), sx.t.end(), t);
    std::size_t hi = static_cast<std::size_t>(it - sx.t.begin());
    if (hi == 0) return cum.front();
    if (hi >= sx.size()) return cum.back();
    const double w = (t - sx.t[hi - 1]) / (sx.t[hi] - sx.t[hi - 1]);
    return cum[hi - 1] + w * (cum[hi] - cum[hi - 1]);
  };
  return interp(t1) - interp(t0);
}

double qsl_time(const RelaxationParams& p, const BlochVector& b0, double tau,
                MetricKind metric, const QuadratureOptions& opts) {
  check_model_inputs(p, b0);
  if (!(tau > 0.0)) throw DomainError("qsl_time: tau must be > 0");
  const double x_tau = evolve_bloch(tau, b0, p).x;
  const double target = geodesic_length(b0.x, x_tau, b0.z, metric);
  if (!(target > 1e-9))
    throw DegenerateError("qsl_time: geodesic length is numerically zero");

  auto ell_to = [&](double t) {
    return path_length(p, b0, metric, 0.0, t, opts).value;
  };
  if (ell_to(tau) < target) return tau;  // bound saturated within tolerance

  double lo = 0.0, hi = tau;
  while (hi - lo > 1e-9 * tau) {
    const double mid = 0.5 * (lo + hi);
    if (ell_to(mid) >= target)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

CrossoverResult crossover_times(const TimeSeries& delta_qfi,
                                const TimeSeries& delta_wy,
                                double noise_floor) {
  validate_series(delta_qfi, 1);
  validate_series(delta_wy, 1);
  if (delta_qfi.size() != delta_wy.size())
    throw DataError("crossover_times: series lengths differ");
  const std::size_t n = delta_qfi.size();
  for (std::size_t i = 0; i < n; ++i)
    if (std::abs(delta_qfi.t[i] - delta_wy.t[i]) >
        1e-12 * std::max(1.0, std::abs(delta_qfi.t[i])))
      throw DataError("crossover_times: time grids differ at index " +
                      std::to_string(i));

  CrossoverResult result;
  // Classify against the floor; walk transitions between +/- classes.
  long prev_idx = -1;
  int prev_class = 0;
  int first_class = 0;
  std::vector<std::pair<double, int>> segments;  // (crossing time, class after)
  for (std::size_t i = 0; i < n; ++i) {
    const double d = delta_qfi.value[i] - delta_wy.value[i];
    if (std::isnan(d)) continue;
    const int cls = d > noise_floor ? 1 : (d < -noise_floor ? -1 : 0);
    if (cls == 0) continue;
    if (first_class == 0) first_class = cls;
    if (prev_class != 0 && cls != prev_class) {
      const double d_prev =
          delta_qfi.value[prev_idx] - delta_wy.value[prev_idx];
      const double t_prev = delta_qfi.t[prev_idx];
      const double t_cur = delta_qfi.t[i];
      const double w = d_prev / (d_prev - d);
      result.times.push_back(t_prev + w * (t_cur - t_prev));
      segments.emplace_back(result.times.back(), cls);
    }
    prev_class = cls;
    prev_idx = static_cast<long>(i);
  }

  if (first_class == 0) return result;  // never left the noise floor
  double seg_start = delta_qfi.t.front();
  int seg_class = first_class;
  for (const auto& [t_cross, cls_after] : segments) {
    result.timeline.push_back(
        {seg_start, t_cross,
         seg_class > 0 ? MetricKind::kWy : MetricKind::kQfi});
    seg_start = t_cross;
    seg_class = cls_after;
  }
  result.timeline.push_back(
      {seg_start, delta_qfi.t.back(),
       seg_class > 0 ? MetricKind::kWy : MetricKind::kQfi});
  return result;
}

void QslReport::validate(double quadrature_tol) const {
  for (const MetricReport* m : {&qfi, &wy}) {
    if (m->path_length < m->geodesic_length - quadrature_tol)
      throw DomainError("QslReport: path length below geodesic bound");
    const double expect = (m->path_length - m->geodesic_length) / m->geodesic_length;
    if (std::abs(expect - m->delta) > 1e-12)
      throw DomainError("QslReport: delta inconsistent with lengths");
  }
}

}  // namespace qsl
