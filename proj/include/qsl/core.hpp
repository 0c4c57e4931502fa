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
#include <complex>
#include <vector>

#include "qsl/errors.hpp"
#include "qsl/types.hpp"

namespace qsl {

using Complex = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
// Row-major, basis order |00>,|01>,|10>,|11> with carbon as the first
// tensor factor.
using Mat4 = Eigen::Matrix<Complex, 4, 4, Eigen::RowMajor>;

/// Kronecker product of two single-qubit operators, first factor = carbon.
Mat4 kron(const Mat2& carbon, const Mat2& hydrogen);

/// Ordered set of Kraus operators forming a CPTP channel on two qubits.
/// Construction checks completeness sum_k K_k^dag K_k = I to 1e-12.
class KrausSet {
 public:
  explicit KrausSet(std::vector<Mat4> ops);

  const std::vector<Mat4>& ops() const { return ops_; }

  /// rho -> sum_k K_k rho K_k^dag.
  Mat4 apply(const Mat4& rho) const;

 private:
  std::vector<Mat4> ops_;
};

/// Validated two-qubit density matrix: Hermitian to 1e-12, unit trace to
/// 1e-12, smallest eigenvalue >= -1e-10.
class TwoQubitDensity {
 public:
  explicit TwoQubitDensity(const Mat4& rho);

  const Mat4& matrix() const { return rho_; }

  /// Bloch vector of the carbon marginal (hydrogen traced out).
  BlochVector carbon_bloch() const;

 private:
  Mat4 rho_;
};

/// rho = (I + x sx + y sy + z sz)/2. Throws DomainError if b is outside
/// the Bloch ball beyond tolerance.
Mat2 bloch_to_density(const BlochVector& b);

/// Inverse of bloch_to_density. Throws DomainError on a non-Hermitian or
/// non-unit-trace input.
BlochVector density_to_bloch(const Mat2& rho);

/// Carbon marginal of a two-qubit state.
Mat2 partial_trace_hydrogen(const Mat4& rho);

/// Phase damping on the carbon factor over a time step dt:
/// K1 = sqrt(q) I(x)I, K2 = sqrt(1-q) sz(x)I, q = (1 + e^{-dt/2T2C})/2.
KrausSet phase_damping_kraus(double dt, double t2c);

/// Bit-phase flip on the hydrogen factor over a time step dt:
/// E1 = sqrt(p) I(x)I, E2 = sqrt(1-p) I(x)sy, p = (1 + e^{-dt/2T1H})/2.
KrausSet bit_phase_flip_kraus(double dt, double t1h);

/// U = exp(-i (pi J/2) sz(x)sz dt); diagonal with phases e^{-+i pi J dt/2}.
Mat4 coupling_unitary(double dt, double j);

}  // namespace qsl
