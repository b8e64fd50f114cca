/*
 * Copyright 2026 The motb Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>

namespace motb {

/// Input does not satisfy a documented invariant (bad spec file, invalid
/// marginal, domain violation). Maps to CLI exit code 2.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The two marginals of a forward-start problem are not in convex order.
class ConvexOrderError : public ValidationError {
 public:
  ConvexOrderError(const std::string& what, double witness)
      : ValidationError(what), witness_(witness) {}
  [[nodiscard]] double witness() const noexcept { return witness_; }

 private:
  double witness_;
};

/// A numerical procedure could not produce a trustworthy value: divergent
/// integral, missing root, solver non-convergence. Maps to CLI exit code 4.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A file could not be read or written. Maps to CLI exit code 3.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A Monte Carlo diagnostic exceeded its threshold (for example too many
/// paths force-stopped at the horizon cap). Maps to CLI exit code 1.
class DiagnosticError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace motb
