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


#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "motb/error.hpp"
#include "motb/lookback.hpp"
#include "test_support.hpp"

namespace motb {
namespace {

using test::linspace;
using test::two_point;
using test::unit_uniform;

// Barrier psi(m) = beta(m) + theta (m - beta(m)) (m - X0) / (r - X0) on the
// uniform law: beta at theta = 0 and still below m for theta < 1.
MonotoneCurve lifted_uniform_barrier(double theta) {
  std::vector<CurveKnot> k;
  for (double m : linspace(0.5, 1.0, 2001)) {
    const double beta = 2.0 * m - 1.0;
    k.push_back({m, beta + theta * (m - beta) * (m - 0.5) / 0.5});
  }
  return MonotoneCurve(std::move(k), Direction::kNondecreasing, Interpolation::kLinear,
                       Continuity::kRight, Extrapolation::kConstant, Extrapolation::kLinear);
}

MonotoneCurve shifted(const MonotoneCurve& psi, double dy) {
  std::vector<CurveKnot> k(psi.knots().begin(), psi.knots().end());
  for (auto& kn : k) kn.y += dy;
  return MonotoneCurve(std::move(k), Direction::kNondecreasing, psi.interpolation(),
                       psi.continuity(), Extrapolation::kConstant, Extrapolation::kLinear);
}

TEST(LambdaStar, DiracIsZero) {
  EXPECT_TRUE(lambda_star(Marginal::dirac(0.4), Payoff::identity()).is_zero());
  EXPECT_TRUE(lambda_star(Marginal::dirac(0.4), Payoff::power(3.0)).is_zero());
}

TEST(LambdaStar, UniformClosedForm) {
  const ConvexHedge h = lambda_star(unit_uniform(), Payoff::identity());
  for (double x : linspace(0.0, 0.99, 991)) {
    EXPECT_NEAR(h(x), test::uniform_lambda(x), 1e-6) << x;
    EXPECT_NEAR(h.slope_right(x), -std::log1p(-x), 1e-5) << x;
  }
  EXPECT_DOUBLE_EQ(h(0.0), 0.0);
  EXPECT_EQ(h.anchor(), 0.0);
}

TEST(LambdaStar, SlopeIsInnerIntegral) {
  // g(x) = x^2 on the uniform law: g'(b(xi)) = 1 + xi and b(dxi) = dxi / 2, so
  // the slope integral is -2 ln(1 - x) - x.
  const ConvexHedge h = lambda_star(unit_uniform(), Payoff::power(2.0));
  for (double x : linspace(0.0, 0.98, 50)) {
    EXPECT_NEAR(h.slope_right(x), -2.0 * std::log1p(-x) - x, 1e-5) << x;
  }
}

TEST(LambdaStar, NonnegativeAndConvex) {
  for (const Marginal& mu : {unit_uniform(), two_point(), Marginal::lognormal(1.0, 0.3, 1.0)}) {
    const ConvexHedge h = lambda_star(mu, Payoff::identity());
    EXPECT_NEAR(h(mu.lower()), 0.0, 1e-12);
    const double hi = std::isfinite(mu.upper()) ? mu.upper() : mu.truncation_level(1e-6);
    const auto xs = linspace(mu.lower() - 0.5, hi, 2001);
    for (std::size_t i = 1; i + 1 < xs.size(); ++i) {
      EXPECT_GE(h(xs[i]), -1e-12);
      EXPECT_GE(h(xs[i - 1]) - 2.0 * h(xs[i]) + h(xs[i + 1]), -1e-10);
    }
  }
}

TEST(LambdaStar, WeakOdeResidual) {
  for (const Marginal& mu : {unit_uniform(), Marginal::lognormal(1.0, 0.3, 1.0)}) {
    for (const Payoff& g : {Payoff::identity(), Payoff::power(2.0)}) {
      const ConvexHedge h = lambda_star(mu, g);
      const double top = std::isfinite(mu.upper()) ? mu.upper() : mu.truncation_level(1e-6);
      const auto ms = linspace(mu.mean() + 0.02 * (top - mu.mean()), mu.mean() + 0.9 * (top - mu.mean()), 9);
      for (std::size_t i = 1; i < ms.size(); ++i) {
        const double lhs = h.slope_right(mu.beta_at(ms[i])) - h.slope_right(mu.beta_at(ms[i - 1]));
        const double rhs = adaptive_simpson(
            [&](double m) { return g.deriv(m) / (m - mu.beta_at(m)); }, ms[i - 1], ms[i], 1e-10)
                               .value;
        EXPECT_NEAR(lhs, rhs, 1e-5 * std::max(1.0, std::abs(rhs))) << g.name() << " " << ms[i];
      }
    }
  }
}

TEST(LookbackBound, Examples) {
  const Payoff id = Payoff::identity();
  EXPECT_NEAR(lookback_bound(Marginal::dirac(0.8), id).bound, 0.8, 1e-15);
  EXPECT_NEAR(lookback_bound(Marginal::dirac(0.8), Payoff::power(2.0)).bound, 0.64, 1e-15);
  EXPECT_NEAR(lookback_bound(unit_uniform(), id).bound, 0.75, 1e-10);
  EXPECT_NEAR(lookback_bound(two_point(), id).bound, test::kTwoPointBound, 1e-10);
}

TEST(LookbackBound, ReportMatchesHardyLittlewood) {
  const Marginal mu = Marginal::from_atoms({{0.2, 0.3}, {1.0, 0.4}, {2.5, 0.3}});
  const BoundReport r = lookback_bound(mu, Payoff::power(1.5));
  EXPECT_DOUBLE_EQ(r.bound, hl_expectation(mu, Payoff::power(1.5)).value);
  EXPECT_DOUBLE_EQ(r.barycenter(0.5), mu.barycenter_at(0.5));
  EXPECT_EQ(r.diagnostics.hedge_knots, r.hedge.knots().size());
}

TEST(LookbackBound, Decomposition) {
  const std::vector<Marginal> laws{unit_uniform(), two_point(), Marginal::dirac(1.0),
                                   Marginal::lognormal(1.0, 0.3, 1.0), Marginal::uniform(-1.0, 3.0),
                                   Marginal::from_atoms({{-1.0, 0.25}, {0.0, 0.25}, {0.5, 0.3}, {2.0, 0.2}})};
  for (const Marginal& mu : laws) {
    for (const Payoff& g : {Payoff::identity(), Payoff::power(2.0), Payoff::smoothed_call(0.6, 0.1)}) {
      if (mu.lower() < 0.0 && g.name() != "identity") continue;
      const BoundReport r = lookback_bound(mu, g);
      const double x0 = mu.mean();
      const double sum = static_price(mu, r.hedge) + v_psi(r.hedge, r.barrier, g, x0, x0);
      EXPECT_NEAR(sum, r.bound, 1e-7) << g.name();
      EXPECT_NEAR(r.diagnostics.decomposition_residual, sum - r.bound, 1e-12);
    }
  }
}

TEST(VPsi, BelowBoundaryIsObstacle) {
  const Marginal u = unit_uniform();
  const Payoff g = Payoff::identity();
  const BoundReport r = lookback_bound(u, g);
  for (double m : {0.6, 0.8, 0.95}) {
    for (double x : linspace(-0.2, r.barrier(m), 7)) {
      EXPECT_DOUBLE_EQ(v_psi(r.hedge, r.barrier, g, x, m), g.eval(m) - r.hedge(x));
    }
  }
}

TEST(VPsi, ZeroHedgeGivesPayoff) {
  const ConvexHedge z = ConvexHedge::zero(0.0);
  const MonotoneCurve psi = optimal_barrier(unit_uniform());
  const Payoff g = Payoff::power(2.0);
  for (double m : {0.5, 0.7, 0.9}) {
    for (double x : {0.0, 0.3, m}) EXPECT_DOUBLE_EQ(v_psi(z, psi, g, x, m), g.eval(m));
  }
}

TEST(VPsi, TangentFormMatchesIntegralForm) {
  const Payoff g = Payoff::identity();
  const BoundReport r = lookback_bound(unit_uniform(), g);
  for (auto [x, m] : {std::pair{0.6, 0.8}, std::pair{0.7, 0.8}, std::pair{0.9, 0.95}}) {
    const double p = r.barrier(m);
    // int_(p, x) (x - y) lambda''(dy): density part plus the knot atoms.
    std::vector<double> cuts;
    double integral = 0.0;
    for (const auto& k : r.hedge.knots()) {
      cuts.push_back(k.x);
      if (k.x > p && k.x < x) integral += (x - k.x) * (k.slope_right - k.slope_left);
    }
    integral += integrate_piecewise([&](double y) { return (x - y) * r.hedge.density(y); }, p, x,
                                    cuts, 1e-13)
                    .value;
    const double expect = g.eval(m) - r.hedge(x) + integral;
    EXPECT_NEAR(v_psi(r.hedge, r.barrier, g, x, m), expect, 1e-8) << x << "," << m;
  }
  EXPECT_NEAR(r.barrier(0.8), 0.6, 1e-9);
}

TEST(VPsi, ConcaveAboveObstacle) {
  const Payoff g = Payoff::identity();
  for (const Marginal& mu : {unit_uniform(), two_point(), Marginal::lognormal(1.0, 0.3, 1.0)}) {
    const BoundReport r = lookback_bound(mu, g);
    const double top = std::isfinite(mu.upper()) ? mu.upper() : 2.5;
    for (double m : linspace(mu.mean(), top, 9)) {
      const auto xs = linspace(mu.lower() - 0.3, m, 301);
      for (std::size_t i = 0; i < xs.size(); ++i) {
        const double v = v_psi(r.hedge, r.barrier, g, xs[i], m);
        EXPECT_GE(v, g.eval(m) - r.hedge(xs[i]) - 1e-12);
        if (i > 0 && i + 1 < xs.size()) {
          const double d2 = v_psi(r.hedge, r.barrier, g, xs[i - 1], m) - 2.0 * v +
                            v_psi(r.hedge, r.barrier, g, xs[i + 1], m);
          EXPECT_LE(d2, 1e-9);
        }
      }
    }
  }
}

TEST(VPsi, DomainViolation) {
  const BoundReport r = lookback_bound(unit_uniform(), Payoff::identity());
  EXPECT_THROW((void)v_psi(r.hedge, r.barrier, Payoff::identity(), 0.9, 0.8), ValidationError);
  EXPECT_THROW((void)semistatic_delta(r.hedge, r.barrier, Payoff::identity(), 0.9, 0.8),
               ValidationError);
}

TEST(VPsi, NeumannOnDiagonal) {
  // d/dm v(x, m) at x = m vanishes; the one-sided quotient is O(h).
  const Payoff g = Payoff::identity();
  const BoundReport r = lookback_bound(unit_uniform(), g);
  for (double m : {0.6, 0.75, 0.9}) {
    double prev = 1.0;
    for (double h : {1e-2, 1e-3, 1e-4}) {
      const double q = std::abs(v_psi(r.hedge, r.barrier, g, m, m + h) -
                                v_psi(r.hedge, r.barrier, g, m, m)) / h;
      EXPECT_LT(q, 20.0 * h + 1e-4) << m << " " << h;
      EXPECT_LE(q, prev + 1e-4);
      prev = q;
    }
  }
}

TEST(UpperBoundGivenPsi, OptimalBarrierAttainsBound) {
  const Payoff g = Payoff::identity();
  EXPECT_NEAR(upper_bound_given_psi(unit_uniform(), g, optimal_barrier(unit_uniform())), 0.75, 1e-8);
  EXPECT_NEAR(upper_bound_given_psi(two_point(), g, optimal_barrier(two_point())),
              test::kTwoPointBound, 1e-10);
}

TEST(UpperBoundGivenPsi, SuboptimalBarriers) {
  const Payoff g = Payoff::identity();
  const MonotoneCurve beta = optimal_barrier(unit_uniform());
  EXPECT_GE(upper_bound_given_psi(unit_uniform(), g, shifted(beta, -0.05)), 0.75);
  for (double theta : {0.05, 0.2, 0.5, 0.8}) {
    EXPECT_GT(upper_bound_given_psi(unit_uniform(), g, lifted_uniform_barrier(theta)), 0.75 + 1e-6)
        << theta;
  }
  EXPECT_NEAR(upper_bound_given_psi(unit_uniform(), g, lifted_uniform_barrier(0.0)), 0.75, 1e-6);
}

TEST(UpperBoundGivenPsi, ConstantPayoff) {
  EXPECT_DOUBLE_EQ(
      upper_bound_given_psi(unit_uniform(), Payoff::constant(3.0), optimal_barrier(unit_uniform())),
      3.0);
}

TEST(SemistaticDelta, Examples) {
  const Payoff g = Payoff::identity();
  const MonotoneCurve psi = optimal_barrier(unit_uniform());
  EXPECT_EQ(semistatic_delta(ConvexHedge::zero(0.0), psi, g, 0.3, 0.7), 0.0);
  const BoundReport r = lookback_bound(unit_uniform(), g);
  const double m = 0.8;
  const double tangent = semistatic_delta(r.hedge, r.barrier, g, 0.65, m);
  for (double x : {0.62, 0.7, 0.79, 0.8}) {
    EXPECT_DOUBLE_EQ(semistatic_delta(r.hedge, r.barrier, g, x, m), tangent);
  }
  EXPECT_NEAR(tangent, std::log(1.0 - 0.6), 1e-5);
  EXPECT_NEAR(semistatic_delta(r.hedge, r.barrier, g, 0.3, m), std::log(0.7), 1e-5);
}

TEST(SemistaticDelta, MatchesFiniteDifference) {
  const Payoff g = Payoff::power(2.0);
  for (const Marginal& mu : {unit_uniform(), Marginal::lognormal(1.0, 0.3, 1.0)}) {
    const BoundReport r = lookback_bound(mu, g);
    for (double m : linspace(mu.mean() + 0.05, mu.mean() + 0.45, 5)) {
      const double p = r.barrier(m);
      for (double x : linspace(mu.lower() + 0.02, m - 1e-3, 23)) {
        if (std::abs(x - p) < 1e-3) continue;
        const double h = 1e-6;
        const double fd = (v_psi(r.hedge, r.barrier, g, x + h, m) -
                           v_psi(r.hedge, r.barrier, g, x - h, m)) / (2.0 * h);
        EXPECT_NEAR(semistatic_delta(r.hedge, r.barrier, g, x, m), fd, 1e-6 * std::max(1.0, std::abs(fd)))
            << x << "," << m;
      }
    }
  }
}

}  // namespace
}  // namespace motb
