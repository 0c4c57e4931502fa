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

#include "qsl/core.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <utility>

namespace qsl {

namespace {

Mat2 pauli_y() {
  Mat2 m;
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}

Mat2 pauli_z() {
  Mat2 m;
  m << 1, 0, 0, -1;
  return m;
}

}  // namespace

Mat4 kron(const Mat2& a, const Mat2& b) {
  Mat4 out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

KrausSet::KrausSet(std::vector<Mat4> ops) : ops_(std::move(ops)) {
  Mat4 sum = Mat4::Zero();
  for (const auto& k : ops_) sum += k.adjoint() * k;
  const double dev = (sum - Mat4::Identity()).cwiseAbs().maxCoeff();
  if (dev > 1e-12)
    throw DomainError("KrausSet: completeness violated, max deviation " +
                      std::to_string(dev));
}

Mat4 KrausSet::apply(const Mat4& rho) const {
  Mat4 out = Mat4::Zero();
  for (const auto& k : ops_) out += k * rho * k.adjoint();
  return out;
}

TwoQubitDensity::TwoQubitDensity(const Mat4& rho) : rho_(rho) {
  const double herm = (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
  if (herm > kHermitianTol)
    throw DomainError("TwoQubitDensity: not Hermitian, deviation " +
                      std::to_string(herm));
  const double tr_dev = std::abs(rho_.trace() - Complex(1.0, 0.0));
  if (tr_dev > kHermitianTol)
    throw DomainError("TwoQubitDensity: trace deviates from 1 by " +
                      std::to_string(tr_dev));
  Eigen::SelfAdjointEigenSolver<Mat4> es(rho_, Eigen::EigenvaluesOnly);
  const double min_eig = es.eigenvalues().minCoeff();
  if (min_eig < kPsdTol)
    throw DomainError("TwoQubitDensity: negative eigenvalue " +
                      std::to_string(min_eig));
}

BlochVector TwoQubitDensity::carbon_bloch() const {
  return density_to_bloch(partial_trace_hydrogen(rho_));
}

Mat2 bloch_to_density(const BlochVector& b) {
  if (!b.is_physical())
    throw DomainError("bloch_to_density: |b|^2 = " + std::to_string(b.norm2()) +
                      " exceeds 1");
  Mat2 rho;
  rho(0, 0) = Complex(0.5 * (1.0 + b.z), 0.0);
  rho(1, 1) = Complex(0.5 * (1.0 - b.z), 0.0);
  rho(0, 1) = Complex(0.5 * b.x, -0.5 * b.y);
  rho(1, 0) = Complex(0.5 * b.x, 0.5 * b.y);
  return rho;
}

BlochVector density_to_bloch(const Mat2& rho) {
  const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  if (herm > kHermitianTol)
    throw DomainError("density_to_bloch: not Hermitian, deviation " +
                      std::to_string(herm));
  const double tr_dev = std::abs(rho.trace() - Complex(1.0, 0.0));
  if (tr_dev > kHermitianTol)
    throw DomainError("density_to_bloch: trace deviates from 1 by " +
                      std::to_string(tr_dev));
  BlochVector b;
  b.x = 2.0 * rho(0, 1).real();
  b.y = -2.0 * rho(0, 1).imag();
  b.z = (rho(0, 0) - rho(1, 1)).real();
  return b;
}

Mat2 partial_trace_hydrogen(const Mat4& rho) {
  Mat2 out;
  for (int c = 0; c < 2; ++c)
    for (int cp = 0; cp < 2; ++cp)
      out(c, cp) = rho(2 * c, 2 * cp) + rho(2 * c + 1, 2 * cp + 1);
  return out;
}

KrausSet phase_damping_kraus(double dt, double t2c) {
  if (!(t2c > 0.0)) throw DomainError("phase_damping_kraus: T2C must be > 0");
  if (dt < 0.0) throw DomainError("phase_damping_kraus: dt must be >= 0");
  const double q = 0.5 * (1.0 + std::exp(-dt / (2.0 * t2c)));
  const Mat2 eye = Mat2::Identity();
  std::vector<Mat4> ops;
  ops.push_back(std::sqrt(q) * kron(eye, eye));
  ops.push_back(std::sqrt(1.0 - q) * kron(pauli_z(), eye));
  return KrausSet(std::move(ops));
}

KrausSet bit_phase_flip_kraus(double dt, double t1h) {
  if (!(t1h > 0.0)) throw DomainError("bit_phase_flip_kraus: T1H must be > 0");
  if (dt < 0.0) throw DomainError("bit_phase_flip_kraus: dt must be >= 0");
  const double p = 0.5 * (1.0 + std::exp(-dt / (2.0 * t1h)));
  const Mat2 eye = Mat2::Identity();
  std::vector<Mat4> ops;
  ops.push_back(std::sqrt(p) * kron(eye, eye));
  ops.push_back(std::sqrt(1.0 - p) * kron(eye, pauli_y()));
  return KrausSet(std::move(ops));
}

Mat4 coupling_unitary(double dt, double j) {
  if (dt < 0.0) throw DomainError("coupling_unitary: dt must be >= 0");
  const double phase = 0.5 * M_PI * j * dt;
  const Complex minus = std::exp(Complex(0.0, -phase));
  const Complex plus = std::exp(Complex(0.0, phase));
  Mat4 u = Mat4::Zero();
  u(0, 0) = minus;  // |00>
  u(1, 1) = plus;   // |01>
  u(2, 2) = plus;   // |10>
  u(3, 3) = minus;  // |11>
  return u;
}

}  // namespace qsl
