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

#include "qsl/series.hpp"
#include "qsl/types.hpp"

namespace qsl {

/// Coherence envelope of the carbon spin,
///   xi(t) = e^{-t/2T2C} e^{-t/4T1H} [ beta sinc(a) + cos(a) ],
/// with beta = t/4T1H and a = beta sqrt(16 pi^2 J^2 T1H^2 - 1). The
/// square root is imaginary in the overdamped regime; sinc and cos then
/// continue to sinh/cosh, evaluated in folded form so large t/T1H never
/// overflows. Near the critical point the series in u = beta^2 (16 pi^2
/// J^2 T1H^2 - 1) is used. xi(0) = 1 and |xi(t)| <= 1 for t >= 0.
double xi(double t, const RelaxationParams& p);

/// Analytic d xi/dt with the same branch logic [1/s].
double xi_derivative(double t, const RelaxationParams& p);

/// (x0, 0, z0) -> (xi(t) x0, 0, z0). Only x-z-plane states evolve under
/// this model; |b0.y| > 1e-12 is rejected.
BlochVector evolve_bloch(double t, const BlochVector& b0,
                         const RelaxationParams& p);

struct TrotterResult {
  TimeSeries sx;  ///< carbon <sx> at every step, label "sx_trotter"
  TimeSeries sy;
  TimeSeries sz;
  /// Set when 0.01/J < dt <= 0.1/J (step too coarse for full accuracy).
  bool coarse_step_warning = false;
};

/// Two-qubit Kraus-channel oracle. Starts from bloch_to_density(b0) (x)
/// I/2 and per step applies coupling_unitary(dt), phase_damping_kraus(dt),
/// bit_phase_flip_kraus(dt), recording the carbon Bloch components. The
/// state is CPTP-validated at every step. dt > 0.1/J throws.
TrotterResult trotter_simulate(double tau, int n_steps, const BlochVector& b0,
                               const RelaxationParams& p);

}  // namespace qsl
