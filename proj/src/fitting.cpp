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

#include "qsl/fitting.hpp"

#include <cmath>

#include "qsl/errors.hpp"

namespace qsl {

namespace {

Eigen::MatrixXd forward_difference_jacobian(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& residuals,
    const Eigen::VectorXd& params, const Eigen::VectorXd& r0) {
  const int n = static_cast<int>(params.size());
  Eigen::MatrixXd jac(r0.size(), n);
  for (int k = 0; k < n; ++k) {
    const double step = 1e-7 * std::max(1.0, std::abs(params[k]));
    Eigen::VectorXd shifted = params;
    shifted[k] += step;
    jac.col(k) = (residuals(shifted) - r0) / step;
  }
  return jac;
}

}  // namespace

LMFit levenberg_marquardt(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& residuals,
    const Eigen::VectorXd& initial, const LMOptions& opts) {
  LMFit fit;
  fit.params = initial;
  Eigen::VectorXd r = residuals(fit.params);
  double ssr = r.squaredNorm();
  fit.residual_history.push_back(ssr);

  double lambda = opts.lambda_init;
  const int n = static_cast<int>(initial.size());
  const int m = static_cast<int>(r.size());
  if (m < n)
    throw DomainError("levenberg_marquardt: fewer residuals than parameters");

  Eigen::MatrixXd jac = forward_difference_jacobian(residuals, fit.params, r);
  for (fit.iterations = 0; fit.iterations < opts.max_iterations;
       ++fit.iterations) {
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd jtr = jac.transpose() * r;

    bool accepted = false;
    for (int damp = 0; damp < 40; ++damp) {
      Eigen::MatrixXd damped = jtj;
      for (int k = 0; k < n; ++k)
        damped(k, k) += lambda * std::max(jtj(k, k), 1e-12);
      const Eigen::VectorXd step = damped.ldlt().solve(-jtr);
      const Eigen::VectorXd trial = fit.params + step;
      const Eigen::VectorXd r_trial = residuals(trial);
      const double ssr_trial = r_trial.squaredNorm();
      if (ssr_trial < ssr) {
        const double rel_step =
            step.norm() / std::max(1.0, fit.params.norm());
        const double ssr_drop = ssr - ssr_trial;
        fit.params = trial;
        r = r_trial;
        ssr = ssr_trial;
        fit.residual_history.push_back(ssr);
        lambda = std::max(lambda * 0.25, 1e-12);
        accepted = true;
        if (rel_step < opts.step_tol || ssr_drop < opts.residual_tol)
          fit.converged = true;
        break;
      }
      lambda *= 10.0;
      if (lambda > 1e12) break;
    }
    if (!accepted) {
      // No downhill step exists at any damping: stationary point.
      fit.converged = true;
      break;
    }
    if (fit.converged) break;
    jac = forward_difference_jacobian(residuals, fit.params, r);
  }

  fit.residual_rms = std::sqrt(ssr / m);
  // Covariance of the fitted parameters at the optimum.
  jac = forward_difference_jacobian(residuals, fit.params, r);
  const Eigen::MatrixXd jtj = jac.transpose() * jac;
  const double variance = m > n ? ssr / (m - n) : 0.0;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(jtj);
  fit.covariance = lu.isInvertible()
                       ? Eigen::MatrixXd(variance * lu.inverse())
                       : Eigen::MatrixXd::Zero(n, n);
  return fit;
}

}  // namespace qsl
