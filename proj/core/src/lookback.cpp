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

#include "motb/lookback.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "motb/error.hpp"
#include "motb/quadrature.hpp"

namespace motb {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// int_a^b g'(u) / (u - p) du for p < a.
double log_weight(const Payoff& g, double p, double a, double b) {
  if (!(b > a)) return 0.0;
  if (std::holds_alternative<Payoff::Identity>(g.kind())) return std::log((b - p) / (a - p));
  return adaptive_simpson([&](double u) { return g.deriv(u) / (u - p); }, a, b,
                          1e-13 + 1e-12 * (b - a))
      .value;
}

ConvexHedge hedge_from_step(const MonotoneCurve& psi, const Payoff& g, double m_end,
                            double anchor) {
  const auto k = psi.knots();
  std::vector<double> x;
  std::vector<double> sl;
  std::vector<double> sr;
  double slope = 0.0;
  for (std::size_t i = 0; i < k.size(); ++i) {
    const double p = k[i].y;
    const double lo = k[i].x;
    const double hi = i + 1 < k.size() ? k[i + 1].x : std::max(lo, m_end);
    if (!(lo > p)) {
      if (hi > lo) throw NumericalError("hedge_from_barrier: barrier must lie below m");
      continue;
    }
    const double mass = log_weight(g, p, lo, hi);
    if (!x.empty() && p == x.back()) {
      sr.back() += mass;
    } else {
      if (!x.empty() && p < x.back()) {
        throw ValidationError("hedge_from_barrier: barrier must be nondecreasing");
      }
      x.push_back(p);
      sl.push_back(slope);
      sr.push_back(slope + mass);
    }
    slope = sr.back();
  }
  if (x.empty()) return ConvexHedge::zero(anchor);
  return ConvexHedge::from_slopes(std::move(x), std::move(sl), std::move(sr), anchor);
}

ConvexHedge hedge_from_linear(const MonotoneCurve& psi, const Payoff& g,
                              std::span<const double> m_grid, double anchor) {
  if (m_grid.size() < 2) throw ValidationError("hedge_from_barrier: m grid needs two points");
  std::vector<double> x;
  std::vector<double> sl;
  std::vector<double> sr;
  auto integrand = [&](double u) {
    const double gap = u - psi(u);
    if (!(gap > 0.0)) throw NumericalError("hedge_from_barrier: barrier must lie below m");
    return g.deriv(u) / gap;
  };
  CompensatedSum k_acc;
  for (std::size_t j = 0; j < m_grid.size(); ++j) {
    // The slope diverges where the barrier meets the diagonal; stop short of it.
    if (!(m_grid[j] > psi(m_grid[j]))) break;
    if (j > 0) {
      const double a = m_grid[j - 1];
      const double b = m_grid[j];
      if (!(b > a)) throw ValidationError("hedge_from_barrier: m grid must increase");
      k_acc.add(adaptive_simpson(integrand, a, b, 1e-14 + 1e-12 * (b - a)).value);
    }
    const double kval = k_acc.value();
    if (!std::isfinite(kval)) throw NumericalError("hedge_from_barrier: slope diverges");
    const double p = psi(m_grid[j]);
    if (!x.empty() && !(p > x.back())) {
      sr.back() = kval;  // flat barrier: accumulate a kink
      continue;
    }
    x.push_back(p);
    sl.push_back(kval);
    sr.push_back(kval);
  }
  if (x.empty()) return ConvexHedge::zero(anchor);
  return ConvexHedge::from_slopes(std::move(x), std::move(sl), std::move(sr), anchor);
}

}  // namespace

ConvexHedge hedge_from_barrier(const MonotoneCurve& psi, const Payoff& g,
                               std::span<const double> m_grid, double anchor) {
  if (psi.direction() != Direction::kNondecreasing) {
    throw ValidationError("hedge_from_barrier: barrier must be nondecreasing");
  }
  if (g.is_constant()) return ConvexHedge::zero(anchor);
  if (psi.interpolation() == Interpolation::kStep) {
    const double m_end = m_grid.empty() ? psi.back_x() : m_grid.back();
    return hedge_from_step(psi, g, m_end, anchor);
  }
  return hedge_from_linear(psi, g, m_grid, anchor);
}

MonotoneCurve optimal_barrier(const Marginal& mu, const HedgeGridOptions& opts) {
  if (mu.is_atomic()) return beta(mu);
  std::vector<CurveKnot> knots;
  for (double x : survival_grid(mu, opts.survival_step, opts.survival_floor)) {
    const double m = mu.barycenter_at(x);
    if (!knots.empty() && !(m > knots.back().x)) continue;
    knots.push_back({m, x});
  }
  if (knots.size() < 2) throw NumericalError("optimal_barrier: degenerate barycenter");
  return MonotoneCurve(std::move(knots), Direction::kNondecreasing, Interpolation::kLinear,
                       Continuity::kRight, Extrapolation::kConstant, Extrapolation::kLinear);
}

ConvexHedge lambda_star(const Marginal& mu, const Payoff& g, const HedgeGridOptions& opts) {
  if (mu.is_degenerate() || g.is_constant()) return ConvexHedge::zero(mu.lower());
  const MonotoneCurve psi = optimal_barrier(mu, opts);
  if (mu.is_atomic()) return hedge_from_barrier(psi, g, {}, mu.lower());
  std::vector<double> m_grid;
  for (const auto& k : psi.knots()) m_grid.push_back(k.x);
  return hedge_from_barrier(psi, g, m_grid, mu.lower());
}

BoundReport lookback_bound(const Marginal& mu, const Payoff& g, const HedgeGridOptions& opts) {
  const HlExpectation hl = hl_expectation(mu, g);
  MonotoneCurve psi = mu.is_degenerate() ? beta(mu) : optimal_barrier(mu, opts);
  ConvexHedge hedge = lambda_star(mu, g, opts);
  const double x0 = mu.mean();
  const double static_leg = static_price(mu, hedge);
  const double dynamic_leg = v_psi(hedge, psi, g, x0, x0);
  BoundReport r{
      .bound = hl.value,
      .hedge = std::move(hedge),
      .barycenter = barycenter(mu),
      .barrier = std::move(psi),
      .static_leg = static_leg,
      .dynamic_leg = dynamic_leg,
      .diagnostics = {},
  };
  r.diagnostics.quadrature_error = hl.error;
  r.diagnostics.truncated_at = hl.truncated_at;
  r.diagnostics.tail_estimate = hl.tail_estimate;
  r.diagnostics.decomposition_residual = static_leg + dynamic_leg - hl.value;
  r.diagnostics.hedge_knots = r.hedge.knots().size();
  return r;
}

double tangent_slope(const ConvexHedge& lambda, const MonotoneCurve& psi, const Payoff& g,
                     double m) {
  const double p = psi(m);
  const long j = lambda.knot_index(p);
  if (j < 0) return lambda.slope_right(p);
  const HedgeKnot& k = lambda.knots()[static_cast<std::size_t>(j)];
  const double jump = k.slope_right - k.slope_left;
  if (!(jump > 1e-14 * (1.0 + std::abs(k.slope_right)))) return k.slope_right;
  // Level set {u : psi(u) = p} = [m_lo, m_hi).
  const double m_lo = std::max(psi.inverse_lower(p), psi.front_x());
  const double m_hi = psi.inverse_upper(p);
  if (!std::isfinite(m_hi) || !(m_hi > m_lo) || !(m_lo > p)) return k.slope_left;
  const double total = log_weight(g, p, m_lo, m_hi);
  if (!(total > 0.0)) return k.slope_left;
  const double part = log_weight(g, p, m_lo, std::clamp(m, m_lo, m_hi));
  return k.slope_left + jump * std::clamp(part / total, 0.0, 1.0);
}

namespace {

void check_domain(double x, double m) {
  if (!std::isfinite(x) || !std::isfinite(m)) throw ValidationError("(x, m) must be finite");
  if (x > m + 1e-12 * (1.0 + std::abs(m))) {
    throw ValidationError("(x, m) must satisfy x <= m; got x = " + std::to_string(x) +
                          ", m = " + std::to_string(m));
  }
}

}  // namespace

double v_psi(const ConvexHedge& lambda, const MonotoneCurve& psi, const Payoff& g, double x,
             double m) {
  check_domain(x, m);
  const double p = psi(m);
  if (x <= p) return g.eval(m) - lambda(x);
  return g.eval(m) - lambda(p) - tangent_slope(lambda, psi, g, m) * (x - p);
}

double semistatic_delta(const ConvexHedge& lambda, const MonotoneCurve& psi, const Payoff& g,
                        double x, double m) {
  check_domain(x, m);
  const double p = psi(m);
  if (x < p) return -lambda.slope_right(x);
  return -tangent_slope(lambda, psi, g, m);
}

double upper_bound_given_psi(const Marginal& mu, const Payoff& g, const MonotoneCurve& psi) {
  const double x0 = mu.mean();
  const double g0 = g.eval(x0);
  if (g.is_constant() || mu.is_degenerate()) return g0;
  double r = mu.upper();
  if (!std::isfinite(r)) {
    r = mu.truncation_level();
    while (mu.call_price(r) > 1e-13) r *= 1.5;
  }
  const double lo = mu.lower();
  const double hi = psi.inverse_lower(r);
  if (!std::isfinite(hi)) {
    throw NumericalError("upper_bound_given_psi: barrier never reaches the top of the support");
  }
  auto integrand = [&](double m) {
    const double p = psi(m);
    double num = mu.call_price(p);
    if (m < x0) num -= std::max(x0 - p, 0.0);
    if (num <= 1e-15) return 0.0;
    if (!(m > p)) throw ValidationError("upper_bound_given_psi: barrier must lie below m");
    return num / (m - p) * g.deriv(m);
  };
  std::vector<double> cuts{x0};
  for (const auto& k : psi.knots()) cuts.push_back(k.x);
  for (const auto& a : mu.atoms()) {
    for (double c : {psi.inverse_lower(a.level), psi.inverse_upper(a.level)}) {
      if (std::isfinite(c)) cuts.push_back(c);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  if (!(hi > lo)) return g0;
  const Quadrature q = integrate_piecewise(integrand, lo, hi, cuts, 1e-10);
  if (!std::isfinite(q.value)) throw NumericalError("upper_bound_given_psi: non-finite integral");
  return g0 + q.value;
}

}  // namespace motb
