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

#include "motb/dual_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "motb/error.hpp"
#include "motb/lookback.hpp"
#include "motb/quadrature.hpp"

namespace motb {
namespace {

constexpr double kExerciseTol = 1e-12;

std::size_t tri(std::size_t i, std::size_t j) { return j * (j + 1) / 2 + i; }

void check_grid(const StoppingGrid& grid) {
  if (grid.n < 3 || !(grid.h > 0.0) || !std::isfinite(grid.x_lo) || grid.origin >= grid.n) {
    throw ValidationError("stopping grid: need at least 3 nodes, h > 0 and X0 on the grid");
  }
}

// Upper concave envelope of (i, y[i]) for i in [0, y.size()), evaluated at
// every integer abscissa. The end points are always on the envelope.
void concave_envelope(std::span<const double> y, std::span<double> out,
                      std::vector<std::size_t>& hull) {
  hull.clear();
  for (std::size_t i = 0; i < y.size(); ++i) {
    while (hull.size() >= 2) {
      const std::size_t a = hull[hull.size() - 2];
      const std::size_t b = hull.back();
      // Drop b when it lies on or below the chord from a to i.
      const double lhs = (y[b] - y[a]) * static_cast<double>(i - a);
      const double rhs = (y[i] - y[a]) * static_cast<double>(b - a);
      if (lhs <= rhs) {
        hull.pop_back();
      } else {
        break;
      }
    }
    hull.push_back(i);
  }
  for (std::size_t k = 0; k + 1 < hull.size(); ++k) {
    const std::size_t a = hull[k];
    const std::size_t b = hull[k + 1];
    const double slope = (y[b] - y[a]) / static_cast<double>(b - a);
    for (std::size_t i = a; i < b; ++i) out[i] = y[a] + slope * static_cast<double>(i - a);
  }
  out[hull.back()] = y[hull.back()];
}

std::vector<double> obstacle(const ConvexHedge& lambda, const Payoff& g,
                             const StoppingGrid& grid) {
  std::vector<double> lam(grid.n);
  for (std::size_t i = 0; i < grid.n; ++i) lam[i] = lambda(grid.x(i));
  std::vector<double> o(grid.n * (grid.n + 1) / 2);
  for (std::size_t j = 0; j < grid.n; ++j) {
    const double gm = g.eval(grid.x(j));
    for (std::size_t i = 0; i <= j; ++i) {
      o[tri(i, j)] = gm - lam[i];
      if (!std::isfinite(o[tri(i, j)])) {
        throw NumericalError("solve_u: obstacle is not finite at x = " +
                             std::to_string(grid.x(i)));
      }
    }
  }
  return o;
}

void finish(DualSolution& sol, const std::vector<double>& o) {
  const StoppingGrid& grid = sol.grid;
  sol.exercise.assign(sol.u.size(), 0);
  sol.boundary.assign(grid.n, grid.x_lo);
  for (std::size_t j = 0; j < grid.n; ++j) {
    bool block = true;
    for (std::size_t i = 0; i <= j; ++i) {
      const std::size_t k = tri(i, j);
      const bool ex = sol.u[k] - o[k] <= kExerciseTol * (1.0 + std::abs(o[k]));
      sol.exercise[k] = ex ? 1 : 0;
      block = block && ex;
      if (block) sol.boundary[j] = grid.x(i);
    }
  }
  sol.value_at_origin = sol.at(grid.origin, grid.origin);
}

}  // namespace

StoppingGrid make_grid(const Marginal& mu, std::size_t n, double hl_tail) {
  if (n < 16) throw ValidationError("stopping grid: at least 16 nodes are required");
  if (!(hl_tail > 0.0 && hl_tail < 1.0)) {
    throw ValidationError("stopping grid: hl_tail must lie in (0, 1)");
  }
  const double x0 = mu.mean();
  const double ell = mu.lower();
  double top = x0;
  if (!mu.is_degenerate()) {
    double hi = std::isfinite(mu.upper()) ? mu.upper() : mu.truncation_level(hl_tail);
    while (mu.hl_survival(hi) > hl_tail) hi = x0 + 2.0 * (hi - x0);
    top = bisect_last_true([&](double y) { return mu.hl_survival(y) > hl_tail; }, x0, hi,
                           1e-12 * (1.0 + std::abs(hi)));
  }
  double span = top - ell;
  if (!(span > 0.0)) span = 1e-3 * (1.0 + std::abs(x0));
  StoppingGrid grid;
  grid.n = n;
  grid.h = span / static_cast<double>(n - 6);
  // Two to three nodes strictly below ell, and X0 exactly on a node.
  const auto below = static_cast<std::size_t>(std::ceil((x0 - ell) / grid.h - 1e-9)) + 2;
  grid.origin = below;
  grid.x_lo = x0 - static_cast<double>(below) * grid.h;
  return grid;
}

StoppingGrid refine(const StoppingGrid& grid) {
  check_grid(grid);
  StoppingGrid out = grid;
  out.h = grid.h / 2.0;
  out.n = 2 * grid.n - 1;
  out.origin = 2 * grid.origin;
  return out;
}

DualSolution solve_u(const ConvexHedge& lambda, const Payoff& g, const StoppingGrid& grid) {
  check_grid(grid);
  const std::vector<double> o = obstacle(lambda, g, grid);
  DualSolution sol;
  sol.grid = grid;
  sol.u.assign(o.size(), 0.0);
  sol.sweeps = 1;
  std::vector<double> pts(grid.n + 1);
  std::vector<double> env(grid.n + 1);
  std::vector<std::size_t> hull;
  hull.reserve(grid.n + 1);
  for (std::size_t j = grid.n; j-- > 0;) {
    // Slice j: obstacle at x_0..x_j; above the top slice there is nothing to
    // reflect into, so the diagonal is absorbing there.
    std::size_t len = j + 1;
    for (std::size_t i = 0; i <= j; ++i) pts[i] = o[tri(i, j)];
    if (j + 1 < grid.n) {
      pts[j + 1] = sol.at(j + 1, j + 1);  // a step up from the diagonal raises m
      ++len;
    }
    concave_envelope(std::span<const double>(pts.data(), len), std::span<double>(env.data(), len),
                     hull);
    for (std::size_t i = 0; i <= j; ++i) sol.u[tri(i, j)] = std::max(env[i], o[tri(i, j)]);
  }
  finish(sol, o);
  return sol;
}

DualSolution solve_u_psor(const ConvexHedge& lambda, const Payoff& g, const StoppingGrid& grid,
                          double omega, double tol, std::size_t max_sweeps) {
  check_grid(grid);
  if (omega == 0.0) {
    omega = 2.0 / (1.0 + std::sin(std::numbers::pi / static_cast<double>(grid.n)));
  }
  if (!(omega > 0.0 && omega < 2.0)) throw ValidationError("psor: omega must lie in (0, 2)");
  const std::vector<double> o = obstacle(lambda, g, grid);
  DualSolution sol;
  sol.grid = grid;
  sol.u = o;
  const std::size_t top = grid.n - 1;
  for (std::size_t sweep = 1; sweep <= max_sweeps; ++sweep) {
    double change = 0.0;
    for (std::size_t j = 1; j <= top; ++j) {
      const std::size_t last = j == top ? j - 1 : j;
      for (std::size_t i = 1; i <= last; ++i) {
        const double right = i == j ? sol.at(j + 1, j + 1) : sol.u[tri(i + 1, j)];
        const double avg = 0.5 * (sol.u[tri(i - 1, j)] + right);
        double& v = sol.u[tri(i, j)];
        const double next = std::max(o[tri(i, j)], v + omega * (avg - v));
        change = std::max(change, std::abs(next - v));
        v = next;
      }
    }
    if (change < tol) {
      sol.sweeps = sweep;
      finish(sol, o);
      return sol;
    }
  }
  throw NumericalError("psor: no convergence after " + std::to_string(max_sweeps) + " sweeps");
}

double dual_value(const Marginal& mu, const Payoff& g, const ConvexHedge& lambda,
                  const StoppingGrid& grid) {
  return static_price(mu, lambda) + solve_u(lambda, g, grid).value_at_origin;
}

std::vector<double> default_dual_knots(const Marginal& mu, std::size_t count) {
  if (mu.is_atomic()) return mu.breakpoints();
  if (count < 2) throw ValidationError("dual knots: need at least two");
  std::vector<double> k{mu.lower()};
  double s = 0.5;
  while (k.size() < count) {
    const double x = mu.survival_quantile(s);
    if (x > k.back()) k.push_back(x);
    s *= 0.5;
    if (s < 1e-15) break;
  }
  return k;
}

namespace {

// Piecewise-linear interpolant of lambda* at the kinks, as slope increments.
std::vector<double> project(const ConvexHedge& star, std::span<const double> kappa) {
  std::vector<double> w(kappa.size(), 0.0);
  double prev = star.slope_left(kappa.front());
  for (std::size_t k = 0; k < kappa.size(); ++k) {
    const double slope = k + 1 < kappa.size()
                             ? (star(kappa[k + 1]) - star(kappa[k])) / (kappa[k + 1] - kappa[k])
                             : star.slope_right(kappa[k]);
    w[k] = std::max(0.0, slope - prev);
    prev = slope;
  }
  return w;
}

}  // namespace

DualMinimum minimize_dual(const Marginal& mu, const Payoff& g, std::span<const double> knots,
                          const StoppingGrid& grid, const DualSearchOptions& opts) {
  if (knots.empty()) throw ValidationError("minimize_dual: at least one kink is required");
  for (std::size_t k = 1; k < knots.size(); ++k) {
    if (!(knots[k] > knots[k - 1])) throw ValidationError("minimize_dual: kinks must increase");
  }
  if (!(opts.initial_step > 0.0) || !(opts.min_step > 0.0)) {
    throw ValidationError("minimize_dual: steps must be positive");
  }
  const double ell = mu.lower();
  auto hedge_of = [&](const std::vector<double>& w) {
    return ConvexHedge::from_kinks(knots, w, ell);
  };
  DualMinimum out;
  auto eval = [&](const std::vector<double>& w) {
    ++out.evaluations;
    return dual_value(mu, g, hedge_of(w), grid);
  };

  std::vector<double> w(knots.size(), 0.0);
  if (opts.warm_start) {
    w = project(lambda_star(mu, g), knots);
  } else {
    w.front() = 1.0;
  }
  double best = eval(w);
  out.trace.push_back({0, best, opts.initial_step});
  double step = opts.initial_step;
  std::size_t iteration = 0;
  while (step >= opts.min_step) {
    bool improved = false;
    for (std::size_t k = 0; k < w.size(); ++k) {
      for (const double dir : {1.0, -1.0}) {
        if (out.evaluations >= opts.max_evaluations) break;
        std::vector<double> cand = w;
        cand[k] = std::max(0.0, w[k] + dir * step);
        if (cand[k] == w[k]) continue;
        const double v = eval(cand);
        if (v < best - 1e-13) {
          w = std::move(cand);
          best = v;
          improved = true;
          out.trace.push_back({++iteration, best, step});
          break;
        }
      }
    }
    if (out.evaluations >= opts.max_evaluations) {
      out.stagnated = true;
      break;
    }
    if (!improved) step *= 0.5;
  }
  out.hedge = hedge_of(w);
  out.weights = std::move(w);
  out.value = best;
  out.gap = best - hl_expectation(mu, g).value;
  return out;
}

}  // namespace motb
