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

#include <span>
#include <variant>
#include <vector>

#include "motb/monotone_curve.hpp"
#include "motb/payoff.hpp"
#include "motb/quadrature.hpp"

namespace motb {

struct Atom {
  double level;
  double mass;
};

/// Law of the underlying at maturity, equivalently its call-price curve
/// c(k) = E[(X - k)^+].
///
/// Three representations are supported: finitely many atoms (a piecewise
/// linear call curve is converted to atoms at its strikes), the uniform law
/// on [lo, hi], and the lognormal law with given mean and total volatility.
/// Negative support is allowed for atoms and uniform laws.
///
/// Instances are immutable; every query is a pure function.
class Marginal {
 public:
  enum class Kind { kAtoms, kUniform, kLognormal };

  static Marginal from_atoms(std::vector<Atom> atoms);
  /// Strikes ascending; the curve is linear between strikes, has slope -1
  /// left of the first strike and must vanish at the last one.
  static Marginal from_call_curve(std::span<const double> strikes,
                                  std::span<const double> prices);
  static Marginal dirac(double level);
  static Marginal uniform(double lo, double hi);
  /// log X ~ N(log(mean) - vol^2 horizon / 2, vol^2 horizon).
  static Marginal lognormal(double mean, double vol, double horizon);

  [[nodiscard]] Kind kind() const;
  [[nodiscard]] bool is_atomic() const { return kind() == Kind::kAtoms; }
  [[nodiscard]] bool is_degenerate() const;
  [[nodiscard]] double mean() const { return mean_; }
  /// Left end of the support (ell).
  [[nodiscard]] double lower() const { return lower_; }
  /// Right end of the support (r), +inf for unbounded laws.
  [[nodiscard]] double upper() const { return upper_; }
  [[nodiscard]] std::span<const Atom> atoms() const;

  [[nodiscard]] double call_price(double k) const;
  /// Right derivative c'(k+) = -mu((k, inf)).
  [[nodiscard]] double call_slope(double k) const;
  /// Left derivative c'(k-) = -mu([k, inf)).
  [[nodiscard]] double call_slope_left(double k) const;
  /// mu([x, inf)).
  [[nodiscard]] double survival(double x) const;
  /// mu((x, inf)).
  [[nodiscard]] double survival_strict(double x) const;

  /// b(x): mean of mu conditioned on [x, inf); b(x) = x from r upwards.
  [[nodiscard]] double barycenter_at(double x) const;
  /// b(x+), the right limit. Differs from b(x) only at atoms.
  [[nodiscard]] double barycenter_right(double x) const;
  /// Largest minimiser of y -> c(y) / (x - y) over y < x, with the usual
  /// conventions ell below the mean and the identity from r upwards.
  [[nodiscard]] double beta_at(double x) const;
  /// mu^HL([y, inf)) = c(beta(y)) / (y - beta(y)); one up to the mean.
  [[nodiscard]] double hl_survival(double y) const;
  /// mu^HL((y, inf)). Differs from hl_survival only at the mean of a Dirac
  /// law and at the top atom of an atomic law.
  [[nodiscard]] double hl_survival_strict(double y) const;

  /// Integral of f against mu. For continuous laws f is integrated against
  /// the density with splits at `breakpoints`.
  [[nodiscard]] Quadrature expectation(const ScalarFn& f,
                                       std::span<const double> breakpoints = {},
                                       double abs_tol = 1e-11) const;
  /// Atom levels, or the support ends of a continuous law.
  [[nodiscard]] std::vector<double> breakpoints() const;
  /// r for bounded laws; otherwise the smallest level above which the
  /// Hardy-Littlewood survival drops below `hl_tail`.
  [[nodiscard]] double truncation_level(double hl_tail = 1e-10) const;
  /// Level x at which mu((x, inf)) ~= p, for 0 < p < 1. Exact for
  /// continuous laws; for atoms the smallest atom with strict survival <= p.
  [[nodiscard]] double survival_quantile(double p) const;

 private:
  struct AtomTable {
    std::vector<Atom> atoms;
    std::vector<double> tail_mass;    // sum_{j >= i} p_j
    std::vector<double> tail_moment;  // sum_{j >= i} p_j a_j
    std::vector<double> bary;         // b(a_i)
    std::vector<double> call;         // c(a_i)
  };
  struct Uniform {
    double lo;
    double hi;
  };
  struct Lognormal {
    double mean;
    double stdev;  // vol * sqrt(horizon)
  };

  explicit Marginal(AtomTable t);
  explicit Marginal(Uniform u);
  explicit Marginal(Lognormal l);

  [[nodiscard]] double upper_moment(double x) const;

  std::variant<AtomTable, Uniform, Lognormal> rep_;
  double mean_ = 0.0;
  double lower_ = 0.0;
  double upper_ = 0.0;
};

/// Convenience wrappers with input checks.
double call_price(const Marginal& mu, double k);
double call_slope(const Marginal& mu, double k);
double hl_survival(const Marginal& mu, double y);

/// The barycenter b as a left-continuous nondecreasing curve.
MonotoneCurve barycenter(const Marginal& mu);
/// beta as a right-continuous nondecreasing curve.
MonotoneCurve beta(const Marginal& mu);

/// Ascending levels starting at ell: geometric in the distribution function
/// (ratio 1 / (1 - step)) over the lower half of a continuous law, geometric in
/// survival (ratio 1 - step) over the upper half, both tails stopping at
/// `floor`. Atomic laws return their atom levels.
std::vector<double> survival_grid(const Marginal& mu, double step, double floor);

struct HlExpectation {
  double value = 0.0;
  double error = 0.0;            // quadrature error estimate
  double truncated_at = 0.0;     // upper integration limit
  double tail_estimate = 0.0;    // contribution discarded above truncated_at
};

/// mu^HL(g) = g(X0) + int_{X0}^{inf} mu^HL([y, inf)) g'(y) dy. Throws
/// NumericalError when the discarded tail exceeds the tolerance.
HlExpectation hl_expectation(const Marginal& mu, const Payoff& g, double abs_tol = 1e-10);

struct ConvexOrder {
  bool ordered = true;
  double witness = 0.0;        // strike with the largest violation
  double max_violation = 0.0;  // max_k c1(k) - c2(k), or the mean gap
};

/// mu1 <= mu2 in convex order: equal means and c1 <= c2 + tol on a strike
/// grid containing every atom of both laws.
ConvexOrder check_convex_order(const Marginal& mu1, const Marginal& mu2, double tol = 1e-9);

}  // namespace motb
