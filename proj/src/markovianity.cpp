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

#include "qsl/markovianity.hpp"

#include <cmath>

#include "qsl/errors.hpp"

namespace qsl {

double l1_coherence(const BlochVector& b) {
  if (!b.is_physical())
    throw DomainError("l1_coherence: state outside the Bloch ball");
  return std::sqrt(b.x * b.x + b.y * b.y);
}

TimeSeries coherence_series(const TimeSeries& sx) {
  validate_series(sx, 1);
  const double ref = std::abs(sx.value.front());
  if (ref == 0.0)
    throw DegenerateError("coherence_series: zero initial coherence");
  TimeSeries out;
  out.t = sx.t;
  out.label = "coherence";
  out.value.reserve(sx.size());
  for (double v : sx.value) out.value.push_back(std::abs(v) / ref);
  return out;
}

MarkovianityVerdict revival_intervals(const TimeSeries& coherence,
                                      double threshold) {
  validate_series(coherence, 3);
  if (threshold < 0.0)
    throw DomainError("revival_intervals: threshold must be >= 0");
  const double ref = std::abs(coherence.value.front());
  if (ref == 0.0)
    throw DegenerateError("revival_intervals: zero initial coherence");

  // Threshold is absolute in normalized units.
  std::vector<double> c;
  c.reserve(coherence.size());
  for (double v : coherence.value) c.push_back(v / ref);

  MarkovianityVerdict verdict;
  const std::size_t n = c.size();
  std::size_t i = 0;
  while (i + 1 < n) {
    // descend to the next local minimum
    while (i + 1 < n && c[i + 1] <= c[i]) ++i;
    if (i + 1 >= n) break;
    const std::size_t start = i;
    // ascend to the following local maximum
    while (i + 1 < n && c[i + 1] >= c[i]) ++i;
    const double gain = c[i] - c[start];
    if (gain > threshold) {
      verdict.revival_intervals.emplace_back(coherence.t[start],
                                             coherence.t[i]);
      verdict.measure += gain;
    }
  }
  verdict.is_non_markovian = !verdict.revival_intervals.empty();
  return verdict;
}

}  // namespace qsl
