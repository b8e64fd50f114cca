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

#include <iosfwd>
#include <span>
#include <vector>

#include "motb/marginal.hpp"

namespace motb {

struct HedgeKnot {
  double x;
  double value;
  double slope_left;   // lambda'(x-)
  double slope_right;  // lambda'(x+)
};

/// A convex static hedge lambda, C^1 between knots with piecewise linear
/// derivative. The second-derivative measure therefore has a constant density
/// on each gap and an atom sR - sL at every knot. Outside the knot range the
/// function continues linearly with the end slopes.
class ConvexHedge {
 public:
  /// lambda == 0, anchored at `anchor`.
  static ConvexHedge zero(double anchor);
  /// Builds values from slopes by exact integration, then shifts so that
  /// lambda(anchor) = 0. Slopes must describe a convex function.
  static ConvexHedge from_slopes(std::vector<double> x, std::vector<double> slope_left,
                                 std::vector<double> slope_right, double anchor);
  /// sum_k w_k (x - kappa_k)^+ with w_k >= 0 and kappa ascending.
  static ConvexHedge from_kinks(std::span<const double> kappa, std::span<const double> weights,
                                double anchor);

  [[nodiscard]] double operator()(double x) const;
  [[nodiscard]] double slope_right(double x) const;
  [[nodiscard]] double slope_left(double x) const;
  /// Density of lambda'' on the open gap containing x (0 outside the knots).
  [[nodiscard]] double density(double x) const;

  [[nodiscard]] std::span<const HedgeKnot> knots() const { return knots_; }
  [[nodiscard]] double anchor() const { return anchor_; }
  [[nodiscard]] bool is_zero() const;
  /// Largest |lambda'| on [lo, hi].
  [[nodiscard]] double max_abs_slope(double lo, double hi) const;
  /// Index of the knot at exactly x, or -1.
  [[nodiscard]] long knot_index(double x) const;
  /// Copy with every slope (and value) multiplied by `factor` >= 0.
  [[nodiscard]] ConvexHedge scaled(double factor) const;

  /// CSV "x,value", one row per knot, 17 significant digits.
  void write_csv(std::ostream& os) const;

 private:
  ConvexHedge(std::vector<HedgeKnot> knots, double anchor);
  [[nodiscard]] double raw_value(double x) const;

  std::vector<HedgeKnot> knots_;
  double anchor_ = 0.0;
};

/// mu(lambda) by direct integration against mu.
double static_price(const Marginal& mu, const ConvexHedge& lambda);

/// mu(lambda) as lambda(X0) + int (c - c0)(y) lambda''(dy), c0(y) = (X0 - y)^+.
double static_price_via_calls(const Marginal& mu, const ConvexHedge& lambda);

}  // namespace motb
