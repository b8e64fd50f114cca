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

#include <cstddef>
#include <functional>
#include <span>

namespace motb {

/// Result of a numerical integration with its estimated absolute error.
struct Quadrature {
  double value = 0.0;
  double error = 0.0;
  std::size_t evaluations = 0;
};

using ScalarFn = std::function<double(double)>;

/// Adaptive Simpson on [a, b] with Richardson correction. The absolute
/// tolerance is split between halves on every refinement. The integral is
/// oriented: b < a gives the negated integral over [b, a].
Quadrature adaptive_simpson(const ScalarFn& f, double a, double b,
                            double abs_tol = 1e-9, int max_depth = 50);

/// Same, but splits [a, b] at every breakpoint that falls strictly inside it
/// (kinks and atoms of the integrand). The tolerance is shared across pieces.
Quadrature integrate_piecewise(const ScalarFn& f, double a, double b,
                               std::span<const double> breakpoints,
                               double abs_tol = 1e-9);

/// Neumaier-compensated running sum. Order dependent, so reductions must
/// visit terms in a fixed order to be reproducible.
class CompensatedSum {
 public:
  void add(double x) noexcept;
  [[nodiscard]] double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Largest x in [lo, hi] with pred(x) true, for a predicate that is true on a
/// left interval and false on the complement. Assumes pred(lo) holds.
double bisect_last_true(const std::function<bool(double)>& pred, double lo,
                        double hi, double x_tol = 1e-13, int max_iter = 200);

}  // namespace motb
