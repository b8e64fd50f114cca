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

#include "motb/convex_hedge.hpp"
#include "motb/marginal.hpp"
#include "motb/monotone_curve.hpp"
#include "motb/payoff.hpp"

namespace motb {

/// Largest root psi of c2(xi) + (x - xi) c2'(xi) = c1(x) with xi < x, found
/// as sup{xi < x : c2(xi) - (x - xi) mu2([xi, inf)) <= c1(x)}. Returns x where
/// c1(x) = c2(x), which covers mu1 = mu2. Throws NumericalError when no xi
/// qualifies, which only happens for marginals that are not in convex order.
double psi2_star(const Marginal& mu1, const Marginal& mu2, double x);

/// psi2* as a curve in m: exact steps when mu2 is atomic, otherwise linear
/// through samples. Constant ell2 on the left, identity from r2 on.
MonotoneCurve psi2_curve(const Marginal& mu1, const Marginal& mu2);

/// True when mu1 <= mu2 and mu2 <= mu1 in convex order, i.e. the laws agree.
bool same_law(const Marginal& mu1, const Marginal& mu2);

struct ForwardBoundReport {
  double bound = 0.0;
  /// The same bound from the form mu1(g) + int (h(m) - mu1([m, inf))) g'(m) dm.
  double bound_alt = 0.0;
  MonotoneCurve obstacle;
  ConvexOrder order;
  bool identical_marginals = false;
  struct Diagnostics {
    double quadrature_error = 0.0;
    double lower_limit = 0.0;       // ell of mu1
    double upper_limit = 0.0;       // r of mu2, or the truncation level
    double tail_integrand = 0.0;    // |integrand| at the upper limit
  } diagnostics;
};

/// Forward-start lookback bound: g(ell1) + int_{ell1}^{r2} h(m) g'(m) dm, where
/// h(m) = -c2'(psi2*(m)) (the root equation fixes the slope at atoms).
/// Throws ConvexOrderError when the marginals are not in convex order.
ForwardBoundReport forward_bound(const Marginal& mu1, const Marginal& mu2, const Payoff& g);

/// Static hedge in the second maturity induced by psi2*, normalised to vanish
/// at psi2*(ell1).
ConvexHedge forward_hedge(const Marginal& mu1, const Marginal& mu2, const Payoff& g);

/// Value at (x, x) of the continuation problem started at the first maturity
/// under the hedge of `forward_hedge`:
/// g(x) - int_{ell1}^{x} g'(u) (x - psi2*(u)) / (u - psi2*(u)) du.
double forward_intermediate_value(const Marginal& mu1, const Marginal& mu2, const Payoff& g,
                                  double x);

}  // namespace motb
