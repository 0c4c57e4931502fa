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
#include <functional>
#include <vector>

namespace qsl {

struct LMOptions {
  int max_iterations = 200;
  double step_tol = 1e-10;      ///< relative parameter step
  double residual_tol = 1e-12;  ///< absolute change of the squared residual
  double lambda_init = 1e-3;
};

struct LMFit {
  Eigen::VectorXd params;
  double residual_rms = 0.0;
  Eigen::MatrixXd covariance;
  bool converged = false;
  int iterations = 0;
  /// Squared residual after every accepted step; strictly decreasing.
  std::vector<double> residual_history;
};

/// Damped least squares (Levenberg-Marquardt) with a forward-difference
/// Jacobian. Steps are accepted only when they reduce the squared
/// residual. Returns best-so-far with converged = false when the
/// iteration budget runs out.
LMFit levenberg_marquardt(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& residuals,
    const Eigen::VectorXd& initial, const LMOptions& opts = {});

}  // namespace qsl
