// errors.hpp - exception types thrown by the qdimer library.
//
// Copyright 2026 The qdimer authors
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

namespace qdimer {

// Invalid run/sweep configuration (bad key, bad value, preset conflict).
// line() is the 1-based config line that triggered the error, 0 if not tied
// to a specific line.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

// Geometry that makes a requested quantity undefined (e.g. zero separation).
class SingularGeometryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical guarantee was violated at run time (positivity, trace,
// dissipativity, ill-conditioned eigenbasis, ...).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Adaptive integrator drove the step size below the resolvable floor.
class StiffnessError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Lifetime fit: trajectory ends before the observable decays enough to fit.
class InsufficientHorizonError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Lifetime fit: decay window exists but is not a clean single exponential.
class FitQualityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qdimer
