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

#include <utility>
#include <vector>

#include "qsl/series.hpp"
#include "qsl/types.hpp"

namespace qsl {

struct MarkovianityVerdict {
  bool is_non_markovian = false;
  /// Maximal (start, end) time intervals of coherence growth above threshold.
  std::vector<std::pair<double, double>> revival_intervals;
  /// Summed coherence gain over the revival intervals (discretized
  /// integral of the positive part of dC/dt); 0 iff no revivals.
  double measure = 0.0;
};

/// l1-norm of coherence in the {|0>,|1>} basis: sqrt(x^2 + y^2).
double l1_coherence(const BlochVector& b);

/// |sx(t)| / |sx(0)|; starts at 1. Throws DegenerateError when sx(0) = 0.
TimeSeries coherence_series(const TimeSeries& sx);

/// Detects revivals: rises of the (internally normalized) coherence series
/// from a local minimum to the following local maximum exceeding threshold.
/// A strictly decreasing series is Markovian.
MarkovianityVerdict revival_intervals(const TimeSeries& coherence,
                                      double threshold = 1e-3);

}  // namespace qsl
