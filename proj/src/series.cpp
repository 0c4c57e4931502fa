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

#include "qsl/series.hpp"

namespace qsl {

void validate_series(const TimeSeries& s, std::size_t min_size) {
  if (s.t.size() != s.value.size())
    throw DataError("TimeSeries '" + s.label + "': time and value lengths differ");
  if (s.t.size() < min_size)
    throw DataError("TimeSeries '" + s.label + "': need at least " +
                    std::to_string(min_size) + " samples, have " +
                    std::to_string(s.t.size()));
  for (std::size_t i = 1; i < s.t.size(); ++i)
    if (!(s.t[i] > s.t[i - 1]))
      throw DataError("TimeSeries '" + s.label +
                      "': time stamps not strictly increasing at index " +
                      std::to_string(i));
}

}  // namespace qsl
