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

#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <random>

#include "qsl/core.hpp"
#include "qsl/dynamics.hpp"
#include "qsl/geometry.hpp"

using namespace qsl;

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);
const RelaxationParams k20mM{7.1e-3, 38.55e-3, 209.1};

// --- test-only matrix-function oracles on 2x2 states -----------------------

Mat2 sqrtm(const Mat2& rho) {
  Eigen::SelfAdjointEigenSolver<Mat2> es(rho);
  Eigen::Vector2d ev = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * ev.cwiseSqrt().asDiagonal() *
         es.eigenvectors().adjoint();
}

double fidelity_matrix_oracle(const Mat2& rho0, const Mat2& rho1) {
  const Mat2 s0 = sqrtm(rho0);
  const Mat2 inner = sqrtm(Mat2(s0 * rho1 * s0));
  const double tr = inner.trace().real();
  return tr * tr;
}

double affinity_matrix_oracle(const Mat2& rho0, const Mat2& rho1) {
  return (sqrtm(rho0) * sqrtm(rho1)).trace().real();
}

// --- test-only x-space quadrature oracles ----------------------------------
// On a monotone piece the path length is (1/2) int sqrt(h(x)) dx. For QFI
// that integral is closed-form; for WY the substitution x = s sin(phi)
// bounds the integrand and a dense Simpson rule suffices.

double qfi_arc_oracle(double xa, double xb, double z0) {
  const double s = std::sqrt(1.0 - z0 * z0);
  const double pa = std::asin(std::clamp(xa / s, -1.0, 1.0));
  const double pb = std::asin(std::clamp(xb / s, -1.0, 1.0));
  return 0.5 * s * std::abs(pb - pa);
}

double wy_arc_oracle(double xa, double xb, double z0) {
  const double s = std::sqrt(1.0 - z0 * z0);
  const double pa = std::asin(std::clamp(xa / s, -1.0, 1.0));
  const double pb = std::asin(std::clamp(xb / s, -1.0, 1.0));
  const double lo = std::min(pa, pb), hi = std::max(pa, pb);
  const int n = 20000;
  // Folded integrand 0.5 sqrt(h_wy) dx/dphi, analytic on [-pi/2, pi/2]:
  // the cos factor absorbed into the root keeps the pure endpoint finite.
  auto f = [&](double phi) {
    if (z0 == 0.0) return 0.5 * s;
    const double sinphi = std::sin(phi), cosphi = std::cos(phi);
    const double x = s * sinphi;
    const double r2 = x * x + z0 * z0;
    const double bracket =
        s * s * sinphi * sinphi +
        2.0 * z0 * z0 * s * s * cosphi * cosphi / (1.0 + s * cosphi);
    return 0.5 * std::sqrt(bracket / r2);
  };
  double sum = f(lo) + f(hi);
  for (int i = 1; i < n; ++i) {
    const double phi = lo + (hi - lo) * i / n;
    sum += (i % 2 == 1 ? 4.0 : 2.0) * f(phi);
  }
  return std::abs(sum * (hi - lo) / (3.0 * n));
}

double model_arc_oracle(const RelaxationParams& p, double x0, double z0,
                        double t0, double t1, MetricKind metric) {
  // split at sign changes of xi' found on a fine grid
  const int n = 200000;
  std::vector<double> cuts{t0};
  double prev = xi_derivative(t0, p);
  for (int i = 1; i <= n; ++i) {
    const double t = t0 + (t1 - t0) * i / n;
    const double d = xi_derivative(t, p);
    if ((prev < 0 && d > 0) || (prev > 0 && d < 0)) {
      double lo = t0 + (t1 - t0) * (i - 1.0) / n, hi = t;
      for (int it = 0; it < 100 && hi - lo > 1e-17; ++it) {
        const double mid = 0.5 * (lo + hi);
        if ((xi_derivative(mid, p) < 0) == (prev < 0))
          lo = mid;
        else
          hi = mid;
      }
      cuts.push_back(0.5 * (lo + hi));
    }
    prev = d;
  }
  cuts.push_back(t1);
  double total = 0.0;
  for (std::size_t i = 1; i < cuts.size(); ++i) {
    const double xa = xi(cuts[i - 1], p) * x0;
    const double xb = xi(cuts[i], p) * x0;
    total += metric == MetricKind::kQfi ? qfi_arc_oracle(xa, xb, z0)
                                        : wy_arc_oracle(xa, xb, z0);
  }
  return total;
}

}  // namespace

TEST_CASE("metric factors match their hand-computed values") {
  CHECK(h_qfi(0.0, 0.0) == 1.0);
  CHECK(h_qfi(0.5, 0.0) == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
  CHECK(h_qfi(0.3, 0.0) < h_qfi(0.9, 0.0));  // diverges toward the boundary
  CHECK(h_qfi(0.999, 0.0) > 499.0);
  CHECK_THROWS_AS(h_qfi(1.0, 0.0), SingularityError);
  CHECK_THROWS_AS(h_qfi(0.8, 0.8), SingularityError);

  CHECK(h_wy(0.5, 0.0) == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
  CHECK(h_wy(0.5, 0.5) == doctest::Approx(3.0 - std::sqrt(2.0)).epsilon(1e-14));
  CHECK_THROWS_AS(h_wy(0.0, 0.0), DegenerateError);
  CHECK_THROWS_AS(h_wy(1.0, 0.1), SingularityError);
}

TEST_CASE("WY reduces to QFI on the equator") {
  for (double x = -0.999; x <= 0.999; x += 1e-3)
    if (x != 0.0) CHECK(std::abs(h_wy(x, 0.0) - h_qfi(x, 0.0)) <= 1e-12);
}

TEST_CASE("fidelity reproduces the hand-evaluated example") {
  CHECK(fidelity(0.4, 0.4, 0.3) == doctest::Approx(1.0).epsilon(1e-15));
  // pure initial state: the s = 0 square-root term vanishes
  CHECK(fidelity(kInvSqrt2, 0.0, kInvSqrt2) ==
        doctest::Approx(0.75).epsilon(1e-14));
  CHECK_THROWS_AS(fidelity(0.9, 0.0, 0.9), DomainError);

  std::mt19937 rng(31);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const double z0 = 0.95 * unit(rng);
    const double cap = std::sqrt(1.0 - z0 * z0);
    const double a = cap * unit(rng), b = cap * unit(rng);
    CHECK(fidelity(a, b, z0) == doctest::Approx(fidelity(b, a, z0)).epsilon(1e-15));
    CHECK(fidelity(a, b, z0) <= 1.0 + 1e-12);
    CHECK(fidelity(a, b, z0) >= 0.0);
  }
}

TEST_CASE("affinity reproduces the hand-evaluated example") {
  CHECK(affinity(0.3, 0.3, 0.8) == doctest::Approx(1.0).epsilon(1e-14));
  const double num = 1.5 + kInvSqrt2;
  const double den =
      std::sqrt(2.0) * (std::sqrt(1.0 + kInvSqrt2) + std::sqrt(1.0 - kInvSqrt2));
  CHECK(affinity(kInvSqrt2, 0.0, kInvSqrt2) ==
        doctest::Approx(num / den).epsilon(1e-14));

  std::mt19937 rng(32);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const double z0 = 0.95 * unit(rng);
    const double cap = std::sqrt(1.0 - z0 * z0);
    const double a = cap * unit(rng), b = cap * unit(rng);
    CHECK(affinity(a, b, z0) == doctest::Approx(affinity(b, a, z0)).epsilon(1e-15));
  }
}

TEST_CASE("closed forms agree with 2x2 matrix-function oracles") {
  std::mt19937 rng(33);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  double worst_f = 0.0, worst_a = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double z0 = 0.95 * unit(rng);
    const double cap = 0.999 * std::sqrt(1.0 - z0 * z0);
    const double x0 = cap * unit(rng), xt = cap * unit(rng);
    const Mat2 rho0 = bloch_to_density({x0, 0.0, z0});
    const Mat2 rho1 = bloch_to_density({xt, 0.0, z0});
    worst_f = std::max(worst_f, std::abs(fidelity(x0, xt, z0) -
                                         fidelity_matrix_oracle(rho0, rho1)));
    worst_a = std::max(worst_a, std::abs(affinity(x0, xt, z0) -
                                         affinity_matrix_oracle(rho0, rho1)));
  }
  CHECK(worst_f <= 1e-10);
  CHECK(worst_a <= 1e-10);
}

TEST_CASE("geodesic lengths give the Bures and Hellinger angles") {
  CHECK(geodesic_length(0.5, 0.5, 0.2, MetricKind::kQfi) == 0.0);
  CHECK(geodesic_length(0.5, 0.5, 0.2, MetricKind::kWy) == 0.0);

  const double bures = geodesic_length(kInvSqrt2, 0.0, kInvSqrt2, MetricKind::kQfi);
  CHECK(std::abs(bures - M_PI / 6.0) <= 1e-12);  // arccos(sqrt(3/4))

  // A = (3/2 + 1/sqrt2) / (sqrt2 (sqrt(1 + 1/sqrt2) + sqrt(1 - 1/sqrt2)))
  //   = 0.844623..., arccos(A) = 0.564935... The comparison tolerance
  // reflects the sqrt sensitivity of A to the last-ulp purity of rho0.
  const double hellinger =
      geodesic_length(kInvSqrt2, 0.0, kInvSqrt2, MetricKind::kWy);
  const double expected = std::acos(
      (1.5 + kInvSqrt2) /
      (std::sqrt(2.0) * (std::sqrt(1.0 + kInvSqrt2) + std::sqrt(1.0 - kInvSqrt2))));
  CHECK(hellinger == doctest::Approx(expected).epsilon(1e-7));
  CHECK(hellinger == doctest::Approx(0.564935).epsilon(1e-5));
  CHECK(hellinger >= bures);  // Hellinger >= Bures here
}

TEST_CASE("checked_acos clamps hairline excursions and rejects real ones") {
  CHECK(checked_acos(1.0 + 5e-13) == 0.0);
  CHECK(checked_acos(-1.0 - 5e-13) == doctest::Approx(M_PI));
  CHECK_THROWS_AS(checked_acos(1.0 + 1e-6), DomainError);
  CHECK_THROWS_AS(checked_acos(-1.1), DomainError);
}

TEST_CASE("relative deviation and its degenerate guard") {
  CHECK(relative_deviation(0.5, 0.5) == 0.0);
  CHECK(relative_deviation(1.0, 0.5) == doctest::Approx(1.0));
  CHECK_THROWS_AS(relative_deviation(1.0, 1e-10), DegenerateError);
}

TEST_CASE("unitary arc over half an oscillation has QFI length pi/2") {
  // z0 = 0, relaxation off: x = cos(pi J t) sweeps 1 -> -1 over [0, 1/J];
  // both endpoints are pure, which stresses the singular handling.
  const RelaxationParams off{1e9, 1e9, 209.1};
  const PathLengthResult arc =
      path_length(off, {1.0, 0.0, 0.0}, MetricKind::kQfi, 0.0, 1.0 / off.j);
  CHECK(arc.value == doctest::Approx(M_PI / 2.0).epsilon(1e-6));
}

TEST_CASE("model path length matches the x-space oracle") {
  const BlochVector b0{kInvSqrt2, 0.0, kInvSqrt2};
  for (MetricKind metric : {MetricKind::kQfi, MetricKind::kWy}) {
    const PathLengthResult got = path_length(k20mM, b0, metric, 0.0, 0.037);
    const double want = model_arc_oracle(k20mM, b0.x, b0.z, 0.0, 0.037, metric);
    CHECK(got.value ==
          doctest::Approx(want).epsilon(metric == MetricKind::kQfi ? 1e-8 : 1e-7));
  }

  // mixed initial state, no singular endpoint
  const BlochVector mixed{0.5, 0.0, 0.3};
  for (MetricKind metric : {MetricKind::kQfi, MetricKind::kWy}) {
    const PathLengthResult got = path_length(k20mM, mixed, metric, 0.0, 0.02);
    const double want = model_arc_oracle(k20mM, mixed.x, mixed.z, 0.0, 0.02, metric);
    CHECK(got.value == doctest::Approx(want).epsilon(1e-7));
  }
}

TEST_CASE("cumulative path length is consistent with single-shot integrals") {
  const BlochVector b0{kInvSqrt2, 0.0, kInvSqrt2};
  std::vector<double> times;
  for (int k = 0; k <= 40; ++k) times.push_back(0.03 * k / 40.0);
  const std::vector<double> cum =
      cumulative_path_length(k20mM, b0, MetricKind::kQfi, times);
  CHECK(cum.front() == 0.0);
  for (int k : {10, 25, 40}) {
    const PathLengthResult direct =
        path_length(k20mM, b0, MetricKind::kQfi, 0.0, times[k]);
    CHECK(cum[k] == doctest::Approx(direct.value).epsilon(1e-8));
  }
  CHECK(std::is_sorted(cum.begin(), cum.end()));
}

TEST_CASE("path length dominates the geodesic length") {
  std::mt19937 rng(2719);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const RelaxationParams p{2e-4 + 2e-2 * unit(rng), 2e-3 + 0.2 * unit(rng),
                             20.0 + 380.0 * unit(rng)};
    const double r0 = 0.3 + 0.7 * unit(rng);
    const double theta = 0.05 + (M_PI / 2 - 0.1) * unit(rng);
    const BlochVector b0{r0 * std::sin(theta), 0.0, r0 * std::cos(theta)};
    const double tau = 1e-3 + 0.05 * unit(rng);
    for (MetricKind metric : {MetricKind::kQfi, MetricKind::kWy}) {
      const PathLengthResult ell = path_length(p, b0, metric, 0.0, tau);
      const double len = geodesic_length(b0.x, xi(tau, p) * b0.x, b0.z, metric);
      CHECK(ell.value >= len - 10.0 * std::max(1e-12, ell.error));
    }
  }
}

TEST_CASE("halving the tolerance moves the result less than the estimate") {
  const BlochVector b0{kInvSqrt2, 0.0, kInvSqrt2};
  QuadratureOptions loose;
  loose.rel_tol = 1e-7;
  QuadratureOptions tight;
  tight.rel_tol = 5e-8;
  for (MetricKind metric : {MetricKind::kQfi, MetricKind::kWy}) {
    const PathLengthResult a = path_length(k20mM, b0, metric, 0.0, 0.05, loose);
    const PathLengthResult b = path_length(k20mM, b0, metric, 0.0, 0.05, tight);
    CHECK(std::abs(a.value - b.value) < a.error);
  }
}

TEST_CASE("pure-endpoint quadrature is robust against tolerance changes") {
  const BlochVector b0{kInvSqrt2, 0.0, kInvSqrt2};
  QuadratureOptions opts;
  opts.rel_tol = 1e-9;
  QuadratureOptions half = opts;
  half.rel_tol = 5e-10;
  const double a = path_length(k20mM, b0, MetricKind::kQfi, 0.0, 0.03, opts).value;
  const double b = path_length(k20mM, b0, MetricKind::kQfi, 0.0, 0.03, half).value;
  CHECK(std::abs(a - b) / a < 1e-6);
}

TEST_CASE("data path: constant series has zero length") {
  TimeSeries flat;
  for (int i = 0; i < 50; ++i) {
    flat.t.push_back(1e-4 * i);
    flat.value.push_back(0.42);
  }
  const std::vector<double> cum =
      cumulative_path_length(flat, 0.3, MetricKind::kQfi);
  CHECK(cum.back() == 0.0);
}

TEST_CASE("data path approaches the model path on a fine grid") {
  const BlochVector b0{kInvSqrt2, 0.0, kInvSqrt2};
  TimeSeries sampled;
  sampled.label = "sx";
  const int n = 6000;
  for (int i = 0; i <= n; ++i) {
    const double t = 0.03 * i / n;
    sampled.t.push_back(t);
    sampled.value.push_back(xi(t, k20mM) * b0.x);
  }
  for (MetricKind metric : {MetricKind::kQfi, MetricKind::kWy}) {
    const double data = cumulative_path_length(sampled, b0.z, metric).back();
    const double model = path_length(k20mM, b0, metric, 0.0, 0.03).value;
    CHECK(data == doctest::Approx(model).epsilon(5e-3));
  }
  // sub-range lookup
  const double part = path_length(sampled, b0.z, MetricKind::kQfi, 0.01, 0.02);
  const double whole = path_length(sampled, b0.z, MetricKind::kQfi, 0.0, 0.03);
  CHECK(part < whole);
  CHECK_THROWS_AS(path_length(sampled, b0.z, MetricKind::kQfi, 0.0, 0.05),
                  DataError);
}

TEST_CASE("data path rejects samples beyond the Bloch boundary") {
  TimeSeries bad;
  bad.t = {0.0, 1e-3, 2e-3};
  bad.value = {0.8, 0.9, 0.8};
  CHECK_THROWS_AS(cumulative_path_length(bad, 0.7, MetricKind::kQfi), DataError);

  TimeSeries lone;
  lone.t = {0.0};
  lone.value = {0.5};
  CHECK_THROWS_AS(cumulative_path_length(lone, 0.0, MetricKind::kQfi), DataError);
}

TEST_CASE("exhausting the subdivision budget raises a convergence error") {
  QuadratureOptions starved;
  starved.rel_tol = 1e-13;
  starved.abs_tol = 1e-300;
  starved.max_subdivisions = 2;
  const BlochVector b0{kInvSqrt2, 0.0, kInvSqrt2};
  CHECK_THROWS_AS(path_length(k20mM, b0, MetricKind::kWy, 0.0, 0.03, starved),
                  ConvergenceError);
}

TEST_CASE("qsl time saturates for geodesic evolution and bounds tau") {
  // z0 = 0 unitary arc: the evolution follows the geodesic, so t* = tau.
  const RelaxationParams off{1e9, 1e9, 209.1};
  const double tau = 0.8 / off.j;
  const double t_star = qsl_time(off, {1.0, 0.0, 0.0}, tau, MetricKind::kQfi);
  CHECK(t_star == doctest::Approx(tau).epsilon(1e-4));

  std::mt19937 rng(5150);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 10; ++i) {
    const RelaxationParams p{1e-3 + 1e-2 * unit(rng), 1e-2 + 0.1 * unit(rng),
                             50.0 + 300.0 * unit(rng)};
    const double t = 2e-3 + 0.02 * unit(rng);
    const double star =
        qsl_time(p, {kInvSqrt2, 0.0, kInvSqrt2}, t, MetricKind::kWy);
    CHECK(star <= t * (1.0 + 1e-12));
    CHECK(star > 0.0);
  }
}

TEST_CASE("qsl time rejects a degenerate (zero-coherence) path") {
  const RelaxationParams p{7.1e-3, 38.55e-3, 209.1};
  CHECK_THROWS_AS(qsl_time(p, {0.0, 0.0, 0.5}, 0.01, MetricKind::kQfi),
                  DegenerateError);
  CHECK_THROWS_AS(qsl_time(p, {0.5, 0.0, 0.5}, 0.0, MetricKind::kQfi),
                  DomainError);
}

TEST_CASE("stronger dephasing reaches the bound sooner") {
  // Same x trajectory traversed faster: fixed target state, shorter t*.
  const RelaxationParams slow{1e9, 30e-3, 209.1};
  const RelaxationParams fast{1e9, 10e-3, 209.1};
  const BlochVector b0{0.6, 0.0, 0.3};
  const double tau1 = 1.5e-3;
  const double x_target = xi(tau1, slow) * b0.x;
  // solve xi_fast(tau2) = xi_slow(tau1) by bisection
  double lo = 0.0, hi = tau1;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (xi(mid, fast) * b0.x > x_target)
      lo = mid;
    else
      hi = mid;
  }
  const double tau2 = 0.5 * (lo + hi);
  CHECK(tau2 < tau1);
  const double t1 = qsl_time(slow, b0, tau1, MetricKind::kQfi);
  const double t2 = qsl_time(fast, b0, tau2, MetricKind::kQfi);
  CHECK(t2 < t1);
}

TEST_CASE("crossover detection locates sign changes above the floor") {
  TimeSeries dq, dw;
  dq.label = "delta_qfi";
  dw.label = "delta_wy";
  const int n = 4000;
  const double period = 0.02;
  for (int i = 0; i <= n; ++i) {
    const double t = 0.1 * i / n;
    dq.t.push_back(t);
    dw.t.push_back(t);
    dq.value.push_back(1e-2 * std::sin(2.0 * M_PI * t / period));
    dw.value.push_back(0.0);
  }
  const CrossoverResult res = crossover_times(dq, dw, 1e-4);
  // zeros at multiples of period/2 in (0, 0.1); the edges do not count
  CHECK(res.times.size() == 9);
  for (std::size_t k = 0; k < res.times.size(); ++k)
    CHECK(res.times[k] == doctest::Approx((k + 1) * period / 2.0).epsilon(1e-3));
  CHECK(res.timeline.size() == 10);
  CHECK(res.timeline.front().tighter == MetricKind::kWy);  // d > 0 first
  CHECK(res.timeline[1].tighter == MetricKind::kQfi);
}

TEST_CASE("crossover detection suppresses sub-floor wiggles and skips NaN") {
  TimeSeries dq, dw;
  for (int i = 0; i <= 100; ++i) {
    const double t = i * 1e-3;
    dq.t.push_back(t);
    dw.t.push_back(t);
    double v = 5e-3;        // WY tighter
    if (i > 50) v = -5e-5;  // dips below zero but under the floor
    if (i == 0) v = std::numeric_limits<double>::quiet_NaN();
    dq.value.push_back(v);
    dw.value.push_back(0.0);
  }
  const CrossoverResult res = crossover_times(dq, dw, 1e-4);
  CHECK(res.times.empty());
  REQUIRE(res.timeline.size() == 1);
  CHECK(res.timeline.front().tighter == MetricKind::kWy);

  TimeSeries mismatched = dw;
  mismatched.t[3] += 1e-6;
  CHECK_THROWS_AS(crossover_times(dq, mismatched, 1e-4), DataError);
}

TEST_CASE("QslReport validation") {
  QslReport report;
  report.qfi = {0.5, 0.4, 0.25};
  report.wy = {0.6, 0.5, 0.2};
  CHECK_NOTHROW(report.validate(1e-9));

  QslReport bound_violation = report;
  bound_violation.qfi.path_length = 0.3;  // below its geodesic
  bound_violation.qfi.delta = (0.3 - 0.4) / 0.4;
  CHECK_THROWS_AS(bound_violation.validate(1e-9), DomainError);

  QslReport inconsistent = report;
  inconsistent.wy.delta = 0.3;
  CHECK_THROWS_AS(inconsistent.validate(1e-9), DomainError);
}
