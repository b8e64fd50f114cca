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
#include <span>

#include "motb/convex_hedge.hpp"
#include "motb/marginal.hpp"
#include "motb/monotone_curve.hpp"
#include "motb/payoff.hpp"

namespace motb {

/// Knot density of continuous-law hedges. Consecutive knots differ by a
/// factor (1 - survival_step) in mu-survival over the upper half of the law
/// and in the distribution function over the lower half; both tails stop at
/// `survival_floor`.
struct HedgeGridOptions {
  double survival_step = 1e-3;
  double survival_floor = 1e-12;
};

/// The hedge whose second derivative solves the free-boundary ODE for the
/// barrier psi: lambda'(x-) = K(inf{m : psi(m) >= x}),
/// lambda'(x+) = K(inf{m : psi(m) > x}), K(M) = int_{m_start}^M g'(u) / (u - psi(u)) du.
///
/// Step barriers are handled exactly (one hedge kink per step). For linear
/// barriers `m_grid` (ascending, starting at m_start) fixes the knots
/// x_j = psi(m_j). lambda is normalised to vanish at `anchor`.
ConvexHedge hedge_from_barrier(const MonotoneCurve& psi, const Payoff& g,
                               std::span<const double> m_grid, double anchor);

/// beta in the form used by lambda_star: the exact step curve for atoms and,
/// for continuous laws, the linear curve through (b(x_j), x_j).
MonotoneCurve optimal_barrier(const Marginal& mu, const HedgeGridOptions& opts = {});

/// Optimal static hedge lambda* for the lookback payoff g(max).
ConvexHedge lambda_star(const Marginal& mu, const Payoff& g, const HedgeGridOptions& opts = {});

struct BoundReport {
  double bound = 0.0;
  ConvexHedge hedge = ConvexHedge::zero(0.0);
  MonotoneCurve barycenter;
  MonotoneCurve barrier;  // beta: stop once X falls to barrier(M)
  double static_leg = 0.0;
  double dynamic_leg = 0.0;
  struct Diagnostics {
    double quadrature_error = 0.0;
    double truncated_at = 0.0;
    double tail_estimate = 0.0;
    double decomposition_residual = 0.0;  // static + dynamic - bound
    std::size_t hedge_knots = 0;
  } diagnostics;
};

BoundReport lookback_bound(const Marginal& mu, const Payoff& g, const HedgeGridOptions& opts = {});

/// Slope of the tangent used above the barrier at level m. Equals lambda'(psi(m))
/// where lambda is differentiable; at a kink it interpolates between the
/// one-sided slopes in proportion to int g'(u) / (u - psi(m)) du over the flat
/// of psi, which is what the ODE prescribes.
double tangent_slope(const ConvexHedge& lambda, const MonotoneCurve& psi, const Payoff& g,
                     double m);

/// v(x, m) = g(m) - lambda(x ^ psi(m)) - s(m) (x - x ^ psi(m)) on {x <= m}.
double v_psi(const ConvexHedge& lambda, const MonotoneCurve& psi, const Payoff& g, double x,
             double m);

/// d/dx of v_psi: -lambda'(x) below the barrier, -s(m) above it.
double semistatic_delta(const ConvexHedge& lambda, const MonotoneCurve& psi, const Payoff& g,
                        double x, double m);

/// g(X0) + int phi(psi(m), m) g'(m) dm with
/// phi(x, m) = (c(x) - (X0 - x)^+ 1{m < X0}) / (m - x).
double upper_bound_given_psi(const Marginal& mu, const Payoff& g, const MonotoneCurve& psi);

}  // namespace motb
