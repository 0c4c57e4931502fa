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

#include <functional>

#include "qsl/errors.hpp"

namespace qsl {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;  ///< absolute error estimate
  int evaluations = 0;
};

/// Globally adaptive Gauss-Kronrod 7-15 integration of f over [a, b].
/// Nodes are interior, so endpoint values of f are never requested.
/// Refines the worst interval until the summed error estimate drops below
/// max(abs_tol, rel_tol * |integral|); throws ConvergenceError once
/// max_subdivisions intervals have been split without reaching it.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    double a, double b, double rel_tol,
                                    double abs_tol, int max_subdivisions);

}  // namespace qsl
