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

#include <cstddef>
#include <string>
#include <vector>

#include "qsl/errors.hpp"

namespace qsl {

/// Sampled real observable: strictly increasing time stamps [s] plus
/// dimensionless values of equal length.
struct TimeSeries {
  std::vector<double> t;
  std::vector<double> value;
  std::string label;

  std::size_t size() const { return t.size(); }
};

/// Throws DataError unless the series satisfies the type invariants
/// (equal lengths, strictly increasing times, at least min_size samples).
void validate_series(const TimeSeries& s, std::size_t min_size = 1);

}  // namespace qsl
