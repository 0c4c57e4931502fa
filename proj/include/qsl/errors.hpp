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

#include <stdexcept>
#include <string>

namespace qsl {

/// Base class for all toolkit errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameter or state value. CLI exit code 2.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Metric factor requested at (or beyond) the Bloch-ball boundary where it
/// diverges; callers integrate around such points.
class SingularityError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Quantity undefined for a degenerate input (zero-length path, maximally
/// mixed state, zero initial coherence).
class DegenerateError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Malformed, inconsistent or insufficient data. CLI exit code 3.
class DataError : public Error {
 public:
  using Error::Error;
};

/// An iterative method exhausted its budget. CLI exit code 4.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace qsl
