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

#include "qsl/errors.hpp"

namespace qsl {

/// Physicality tolerance on the squared Bloch norm.
inline constexpr double kBlochNormTol = 1e-12;

/// Hermiticity / unit-trace tolerance for density matrices.
inline constexpr double kHermitianTol = 1e-12;

/// Floor on the smallest density-matrix eigenvalue. Loose enough that
/// rounding accumulated over ~1e5 trotter steps never trips it.
inline constexpr double kPsdTol = -1e-10;

/// Single-qubit state as the real expectation vector (<sx>, <sy>, <sz>).
struct BlochVector {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double norm2() const { return x * x + y * y + z * z; }
  bool is_physical(double tol = kBlochNormTol) const {
    return norm2() <= 1.0 + tol;
  }
};

/// Relaxation and coupling parameters of the two-spin model.
/// t1h: hydrogen longitudinal relaxation time [s];
/// t2c: carbon transverse relaxation time [s];
/// j:   scalar coupling strength [Hz].
struct RelaxationParams {
  double t1h = 0.0;
  double t2c = 0.0;
  double j = 0.0;

  void validate() const {
    if (!(t1h > 0.0)) throw DomainError("RelaxationParams: T1H must be > 0");
    if (!(t2c > 0.0)) throw DomainError("RelaxationParams: T2C must be > 0");
    if (!(j > 0.0)) throw DomainError("RelaxationParams: J must be > 0");
  }
};

}  // namespace qsl
