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

#include "motb/forward.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "motb/error.hpp"
#include "motb/lookback.hpp"
#include "motb/quadrature.hpp"

namespace motb {
namespace {

// Where c2 has become negligible; r2 itself for bounded laws.
double effective_top(const Marginal& mu) {
  if (std::isfinite(mu.upper())) return mu.upper();
  double r = mu.truncation_level();
  while (mu.call_price(r) > 1e-13) r *= 1.5;
  return r;
}

MonotoneCurve identity_curve(double lo, double hi) {
  if (!(hi > lo)) hi = lo + 1.0;
  return MonotoneCurve({{lo, lo}, {hi, hi}}, Direction::kNondecreasing, Interpolation::kLinear,
                       Continuity::kRight, Extrapolation::kIdentity, Extrapolation::kIdentity);
}

// Normalised intensity h(m) = (c2(psi) - c1(m)) / (m - psi); mu2([m, inf)) when psi = m.
double ratio_h(const Marginal& mu1, const Marginal& mu2, double m, double p) {
  if (!(m > p)) return mu2.survival(m);
  return (mu2.call_price(p) - mu1.call_price(m)) / (m - p);
}

}  // namespace

double psi2_star(const Marginal& mu1, const Marginal& mu2, double x) {
  if (!std::isfinite(x)) throw ValidationError("psi2_star: x must be finite");
  const double c1 = mu1.call_price(x);
  const double tol = 1e-14 * (1.0 + std::abs(x));
  if (mu2.call_price(x) - c1 <= tol) return x;
  auto f = [&](double xi) { return mu2.call_price(xi) - (x - xi) * mu2.survival(xi) - c1; };
  const double lo = mu2.lower();
  if (f(lo) > tol) {
    throw NumericalError("psi2_star: no root below x = " + std::to_string(x) +
                         "; marginals are not in convex order");
  }
  if (mu2.is_atomic()) {
    const auto atoms = mu2.atoms();
    // f is nondecreasing along the atoms below x; find the last one with f <= 0.
    std::size_t lo_i = 0;
    std::size_t hi_i = static_cast<std::size_t>(
        std::lower_bound(atoms.begin(), atoms.end(), x,
                         [](const Atom& a, double v) { return a.level < v; }) -
        atoms.begin());
    while (hi_i - lo_i > 1) {
      const std::size_t mid = (lo_i + hi_i) / 2;
      if (f(atoms[mid].level) <= tol) {
        lo_i = mid;
      } else {
        hi_i = mid;
      }
    }
    return atoms[lo_i].level;
  }
  return bisect_last_true([&](double xi) { return f(xi) <= 0.0; }, lo, x,
                          1e-14 * (1.0 + std::abs(x)));
}

bool same_law(const Marginal& mu1, const Marginal& mu2) {
  return check_convex_order(mu1, mu2, 1e-12).ordered &&
         check_convex_order(mu2, mu1, 1e-12).ordered;
}

MonotoneCurve psi2_curve(const Marginal& mu1, const Marginal& mu2) {
  const double l1 = mu1.lower();
  const double top = effective_top(mu2);
  if (same_law(mu1, mu2)) return identity_curve(l1, top);
  std::vector<CurveKnot> knots{{l1, psi2_star(mu1, mu2, l1)}};
  if (mu2.is_atomic()) {
    // One knot where psi first reaches each atom above psi(ell1).
    for (const auto& a : mu2.atoms()) {
      if (!(a.level > knots.front().y) || !(a.level < top)) continue;
      const double m = bisect_last_true(
          [&](double mm) { return psi2_star(mu1, mu2, mm) < a.level; }, l1, top,
          1e-14 * (1.0 + std::abs(top)));
      if (m > knots.back().x) {
        knots.push_back({m, a.level});
      } else {
        knots.back().y = a.level;
      }
    }
    if (top > knots.back().x) knots.push_back({top, top});
    return MonotoneCurve(std::move(knots), Direction::kNondecreasing, Interpolation::kStep,
                         Continuity::kRight, Extrapolation::kConstant, Extrapolation::kIdentity);
  }
  for (double m : survival_grid(mu2, 2e-3, 1e-12)) {
    if (!(m > knots.back().x)) continue;
    knots.push_back({m, std::max(psi2_star(mu1, mu2, m), knots.back().y)});
  }
  if (knots.size() < 2) knots.push_back({top, top});
  return MonotoneCurve(std::move(knots), Direction::kNondecreasing, Interpolation::kLinear,
                       Continuity::kRight, Extrapolation::kConstant, Extrapolation::kLinear);
}

ForwardBoundReport forward_bound(const Marginal& mu1, const Marginal& mu2, const Payoff& g) {
  ConvexOrder order = check_convex_order(mu1, mu2);
  if (!order.ordered) {
    throw ConvexOrderError("marginals are not in convex order: c1 exceeds c2 by " +
                               std::to_string(order.max_violation) + " at strike " +
                               std::to_string(order.witness),
                           order.witness);
  }
  const double l1 = mu1.lower();
  const double top = effective_top(mu2);
  const bool identical = same_law(mu1, mu2);
  std::vector<double> cuts = mu1.breakpoints();
  for (double a : mu2.breakpoints()) cuts.push_back(a);
  cuts.push_back(mu1.mean());

  auto g_val = [&](double x) { return g.eval(x); };
  const double mu1_g = mu1.expectation(g_val, cuts, 1e-12).value;

  ForwardBoundReport r{
      .bound = mu1_g,
      .bound_alt = mu1_g,
      .obstacle = identical ? identity_curve(l1, top) : psi2_curve(mu1, mu2),
      .order = order,
      .identical_marginals = identical,
      .diagnostics = {},
  };
  r.diagnostics.lower_limit = l1;
  r.diagnostics.upper_limit = top;
  if (identical || g.is_constant() || !(top > l1)) return r;

  for (const auto& k : r.obstacle.knots()) cuts.push_back(k.x);
  std::sort(cuts.begin(), cuts.end());

  auto h_slope = [&](double m) {
    const double p = psi2_star(mu1, mu2, m);
    if (!(m > p)) return mu2.survival(m);
    if (!mu2.is_atomic()) return mu2.survival(p);
    // At an atom the slope of c2 is only known up to its two one-sided values;
    // the root equation selects the one in between.
    return std::clamp(ratio_h(mu1, mu2, m, p), mu2.survival_strict(p), mu2.survival(p));
  };
  auto form_a = [&](double m) { return h_slope(m) * g.deriv(m); };
  auto form_b = [&](double m) {
    const double p = psi2_star(mu1, mu2, m);
    return (ratio_h(mu1, mu2, m, p) - mu1.survival(m)) * g.deriv(m);
  };
  const Quadrature qa = integrate_piecewise(form_a, l1, top, cuts, 1e-10);
  const Quadrature qb = integrate_piecewise(form_b, l1, top, cuts, 1e-10);
  r.bound = g.eval(l1) + qa.value;
  r.bound_alt = mu1_g + qb.value;
  r.diagnostics.quadrature_error = qa.error;
  r.diagnostics.tail_integrand = std::abs(form_a(top));
  if (!std::isfinite(r.bound) || !std::isfinite(r.bound_alt)) {
    throw NumericalError("forward_bound: non-finite integral");
  }
  return r;
}

ConvexHedge forward_hedge(const Marginal& mu1, const Marginal& mu2, const Payoff& g) {
  const MonotoneCurve psi = psi2_curve(mu1, mu2);
  const double anchor = psi(mu1.lower());
  if (g.is_constant() || same_law(mu1, mu2)) return ConvexHedge::zero(anchor);
  if (mu2.is_atomic()) return hedge_from_barrier(psi, g, {}, anchor);
  std::vector<double> m_grid;
  for (const auto& k : psi.knots()) m_grid.push_back(k.x);
  return hedge_from_barrier(psi, g, m_grid, anchor);
}

double forward_intermediate_value(const Marginal& mu1, const Marginal& mu2, const Payoff& g,
                                  double x) {
  if (!std::isfinite(x)) throw ValidationError("forward_intermediate_value: x must be finite");
  const double l1 = mu1.lower();
  if (g.is_constant() || !(x > l1) || same_law(mu1, mu2)) return g.eval(x);
  auto integrand = [&](double u) {
    const double p = psi2_star(mu1, mu2, u);
    if (!(u > p)) {
      throw NumericalError("forward_intermediate_value: c1 touches c2 at " + std::to_string(u) +
                           "; the induced hedge is unbounded");
    }
    return g.deriv(u) * (x - p) / (u - p);
  };
  std::vector<double> cuts = mu1.breakpoints();
  for (double a : mu2.breakpoints()) cuts.push_back(a);
  if (mu2.is_atomic()) {
    const MonotoneCurve psi = psi2_curve(mu1, mu2);
    for (const auto& k : psi.knots()) cuts.push_back(k.x);
  }
  std::sort(cuts.begin(), cuts.end());
  return g.eval(x) - integrate_piecewise(integrand, l1, x, cuts, 1e-11).value;
}

}  // namespace motb
