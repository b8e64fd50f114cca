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
#include <vector>

#include "motb/convex_hedge.hpp"
#include "motb/marginal.hpp"
#include "motb/payoff.hpp"

namespace motb {

/// Uniform nodes x_i = x_lo + i h, i < n, shared by the x and m axes; the
/// triangle {x_i <= m_j} carries the stopping problem. X0 is a node.
struct StoppingGrid {
  double x_lo = 0.0;
  double h = 0.0;
  std::size_t n = 0;
  std::size_t origin = 0;  // index of X0

  [[nodiscard]] double x(std::size_t i) const { return x_lo + static_cast<double>(i) * h; }
  [[nodiscard]] double x_hi() const { return x(n - 1); }
};

/// n nodes from just below ell to just beyond the level where the
/// Hardy-Littlewood survival falls to `hl_tail`.
StoppingGrid make_grid(const Marginal& mu, std::size_t n, double hl_tail = 1e-6);

/// Same x_lo and origin, half the spacing; every old node stays a node.
StoppingGrid refine(const StoppingGrid& grid);

struct DualSolution {
  StoppingGrid grid;
  /// u(x_i, m_j) for i <= j, slice by slice (slice j holds j + 1 values).
  std::vector<double> u;
  std::vector<unsigned char> exercise;  // u == g(m) - lambda(x)
  /// Extracted free boundary: the top of the exercised block that starts at
  /// x_lo on each slice, per m node.
  std::vector<double> boundary;
  double value_at_origin = 0.0;
  std::size_t sweeps = 0;  // 1 for the envelope solver

  [[nodiscard]] double at(std::size_t i, std::size_t j) const { return u[j * (j + 1) / 2 + i]; }
  [[nodiscard]] bool exercised(std::size_t i, std::size_t j) const {
    return exercise[j * (j + 1) / 2 + i] != 0;
  }
};

/// Value of stopping g(M) - lambda(X) optimally for the walk on the grid,
/// reflected in m on the diagonal and absorbed at x_lo and at the top slice.
/// Each slice is the upper concave envelope of its obstacle with the value
/// carried down from the slice above, which is the exact fixed point of
/// u = max(obstacle, neighbour average).
DualSolution solve_u(const ConvexHedge& lambda, const Payoff& g, const StoppingGrid& grid);

/// The same fixed point by projected successive over-relaxation, m ascending.
/// Throws NumericalError without convergence after `max_sweeps`.
DualSolution solve_u_psor(const ConvexHedge& lambda, const Payoff& g, const StoppingGrid& grid,
                          double omega = 0.0, double tol = 1e-10,
                          std::size_t max_sweeps = 200000);

/// mu(lambda) + u(X0, X0).
double dual_value(const Marginal& mu, const Payoff& g, const ConvexHedge& lambda,
                  const StoppingGrid& grid);

/// Default kinks for minimize_dual: the atoms of an atomic law, otherwise
/// ell followed by the levels with survival 2^-k.
std::vector<double> default_dual_knots(const Marginal& mu, std::size_t count = 16);

struct DualSearchOptions {
  bool warm_start = true;   // start from the projection of lambda*, else (x - ell)^+
  double initial_step = 0.25;
  double min_step = 1e-4;
  std::size_t max_evaluations = 20000;
};

struct DualTraceEntry {
  std::size_t iteration = 0;
  double value = 0.0;
  double step = 0.0;
};

struct DualMinimum {
  ConvexHedge hedge = ConvexHedge::zero(0.0);
  std::vector<double> weights;  // slope increments at the kinks
  double value = 0.0;
  double gap = 0.0;             // value - lookback bound
  std::size_t evaluations = 0;
  bool stagnated = false;       // evaluation budget ran out before min_step
  std::vector<DualTraceEntry> trace;  // one entry per accepted step
};

/// Coordinate search with halving steps over lambda = sum_k w_k (x - kappa_k)^+,
/// w_k >= 0.
DualMinimum minimize_dual(const Marginal& mu, const Payoff& g, std::span<const double> knots,
                          const StoppingGrid& grid, const DualSearchOptions& opts = {});

}  // namespace motb
