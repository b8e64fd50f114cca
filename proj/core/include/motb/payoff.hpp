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

#include <string>
#include <variant>
#include <vector>

namespace motb {

/// A nondecreasing C^1 payoff g applied to the running maximum.
///
/// The raw call on the maximum (x - K)^+ is not C^1 and is only available
/// through `smoothed_call`, which replaces the kink on [K - eps, K + eps] by
/// the quadratic (x - K + eps)^2 / (4 eps). Bounds computed with it differ
/// from the raw-call bound by at most eps/4 times the relevant probability.
class Payoff {
 public:
  struct Identity {};
  struct Power {
    double exponent;  // >= 1, applied to max(x, 0)
  };
  struct SmoothedCall {
    double strike;
    double eps;
  };
  struct TabulatedKnot {
    double x;
    double g;
    double dg;
  };
  /// Cubic Hermite through (x, g, dg); linear extrapolation with end slopes.
  struct Tabulated {
    std::vector<TabulatedKnot> knots;
  };
  using Kind = std::variant<Identity, Power, SmoothedCall, Tabulated>;

  static Payoff identity() { return Payoff(Identity{}); }
  static Payoff power(double exponent);
  static Payoff smoothed_call(double strike, double eps);
  static Payoff tabulated(std::vector<TabulatedKnot> knots);
  static Payoff constant(double level);

  [[nodiscard]] double eval(double x) const;
  [[nodiscard]] double deriv(double x) const;

  [[nodiscard]] const Kind& kind() const { return kind_; }
  [[nodiscard]] std::string name() const;
  /// True when g' vanishes identically.
  [[nodiscard]] bool is_constant() const;

 private:
  explicit Payoff(Kind kind) : kind_(std::move(kind)) {}
  Kind kind_;
};

}  // namespace motb
