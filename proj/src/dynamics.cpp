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

#include "qsl/dynamics.hpp"

#include <cmath>
#include <string>

#include "qsl/core.hpp"

namespace qsl {

namespace {

// Series/trig/hyperbolic switch on u = beta^2 (16 pi^2 J^2 T1H^2 - 1).
constexpr double kBranchTol = 1e-8;

struct XiEval {
  double value;       // xi(t)
  double derivative;  // d xi/dt
};

XiEval evaluate_xi(double t, const RelaxationParams& p) {
  p.validate();
  if (t < 0.0) throw DomainError("xi: t must be >= 0");

  const double gamma2 = 1.0 / (2.0 * p.t2c);   // dephasing rate
  const double gamma1 = 1.0 / (4.0 * p.t1h);   // flip rate
  const double beta = t * gamma1;
  const double four_pi_j_t1h = 4.0 * M_PI * p.j * p.t1h;
  const double D = four_pi_j_t1h * four_pi_j_t1h - 1.0;
  const double u = beta * beta * D;

  // C(u) = cos(sqrt(u)), S(u) = sin(sqrt(u))/sqrt(u), analytically
  // continued through u <= 0. B = beta S + C; dB/dt = gamma1 (C - beta D S).
  double env_bracket;    // e^{-beta} B
  double env_bracket_d;  // d/dt of e^{-beta} B
  if (u < -kBranchTol) {
    // Overdamped branch, folded so only negative exponents appear:
    // e^{-beta} B = [(1 + 1/g) e^{-beta(1-g)} + (1 - 1/g) e^{-beta(1+g)}]/2.
    const double g = std::sqrt(-D);
    const double am = std::exp(-beta * (1.0 - g));
    const double ap = std::exp(-beta * (1.0 + g));
    env_bracket = 0.5 * ((1.0 + 1.0 / g) * am + (1.0 - 1.0 / g) * ap);
    env_bracket_d = 0.5 * gamma1 *
                    (-(1.0 - g) * (1.0 + 1.0 / g) * am -
                     (1.0 + g) * (1.0 - 1.0 / g) * ap);
  } else {
    double c, s;
    if (u > kBranchTol) {
      const double a = std::sqrt(u);
      c = std::cos(a);
      s = std::sin(a) / a;
    } else {
      c = 1.0 - u / 2.0 + u * u / 24.0;
      s = 1.0 - u / 6.0 + u * u / 120.0;
    }
    const double b_val = beta * s + c;
    const double db_dt = gamma1 * (c - beta * D * s);
    const double e = std::exp(-beta);
    env_bracket = e * b_val;
    env_bracket_d = e * (db_dt - gamma1 * b_val);
  }

  const double e2 = std::exp(-gamma2 * t);
  XiEval out;
  out.value = e2 * env_bracket;
  out.derivative = e2 * (env_bracket_d - gamma2 * env_bracket);
  return out;
}

}  // namespace

double xi(double t, const RelaxationParams& p) { return evaluate_xi(t, p).value; }

double xi_derivative(double t, const RelaxationParams& p) {
  return evaluate_xi(t, p).derivative;
}

BlochVector evolve_bloch(double t, const BlochVector& b0,
                         const RelaxationParams& p) {
  if (!b0.is_physical())
    throw DomainError("evolve_bloch: initial state outside the Bloch ball");
  if (std::abs(b0.y) > 1e-12)
    throw DomainError("evolve_bloch: states with <sy> != 0 are unsupported");
  return BlochVector{xi(t, p) * b0.x, 0.0, b0.z};
}

TrotterResult trotter_simulate(double tau, int n_steps, const BlochVector& b0,
                               const RelaxationParams& p) {
  p.validate();
  if (!(tau > 0.0)) throw DomainError("trotter_simulate: tau must be > 0");
  if (n_steps < 1) throw DomainError("trotter_simulate: n_steps must be >= 1");
  if (!b0.is_physical())
    throw DomainError("trotter_simulate: initial state outside the Bloch ball");
  if (std::abs(b0.y) > 1e-12)
    throw DomainError("trotter_simulate: states with <sy> != 0 are unsupported");

  const double dt = tau / n_steps;
  if (dt > 0.1 / p.j)
    throw DomainError("trotter_simulate: step " + std::to_string(dt) +
                      " s exceeds 0.1/J; refine n_steps");
  TrotterResult result;
  result.coarse_step_warning = dt > 0.01 / p.j;

  const Mat4 u = coupling_unitary(dt, p.j);
  const KrausSet dephase = phase_damping_kraus(dt, p.t2c);
  const KrausSet flip = bit_phase_flip_kraus(dt, p.t1h);

  Mat4 rho = kron(bloch_to_density(b0), 0.5 * Mat2::Identity());

  auto& sx = result.sx;
  auto& sy = result.sy;
  auto& sz = result.sz;
  sx.label = "sx_trotter";
  sy.label = "sy_trotter";
  sz.label = "sz_trotter";
  for (auto* s : {&sx, &sy, &sz}) {
    s->t.reserve(n_steps + 1);
    s->value.reserve(n_steps + 1);
  }
  auto record = [&](double time, const TwoQubitDensity& state) {
    const BlochVector b = state.carbon_bloch();
    sx.t.push_back(time);
    sx.value.push_back(b.x);
    sy.t.push_back(time);
    sy.value.push_back(b.y);
    sz.t.push_back(time);
    sz.value.push_back(b.z);
  };

  record(0.0, TwoQubitDensity(rho));
  for (int k = 1; k <= n_steps; ++k) {
    rho = u * rho * u.adjoint();
    rho = dephase.apply(rho);
    rho = flip.apply(rho);
    // Multiplicative rounding is systematic over ~1e4 identical steps;
    // re-hermitize and renormalize so the 1e-12 state tolerances hold.
    rho = 0.5 * (rho + Mat4(rho.adjoint()));
    rho /= rho.trace().real();
    record(k * dt, TwoQubitDensity(rho));
  }
  return result;
}

}  // namespace qsl
