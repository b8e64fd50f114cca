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
#include <random>
#include <vector>

#include "motb/error.hpp"
#include "motb/forward.hpp"
#include "motb/lookback.hpp"
#include "test_support.hpp"

namespace motb {
namespace {

using test::linspace;
using test::two_point;
using test::unit_uniform;

double expect_g(const Marginal& mu, const Payoff& g) {
  return mu.expectation([&](double x) { return g.eval(x); }).value;
}

TEST(Psi2Star, IdenticalMarginalsGiveIdentity) {
  for (const Marginal& mu : {unit_uniform(), two_point()}) {
    for (double x : {0.1, 0.5, 0.9}) EXPECT_DOUBLE_EQ(psi2_star(mu, mu, x), x);
  }
}

TEST(Psi2Star, PointMassGivesBeta) {
  const Marginal d = Marginal::dirac(0.5);
  EXPECT_NEAR(psi2_star(d, unit_uniform(), 0.75), 0.5, 1e-9);
  for (double x : linspace(0.51, 0.99, 25)) {
    EXPECT_NEAR(psi2_star(d, unit_uniform(), x), unit_uniform().beta_at(x), 1e-9) << x;
    EXPECT_NEAR(psi2_star(d, two_point(), x), two_point().beta_at(x), 1e-12) << x;
  }
  const Marginal mu2 = Marginal::from_atoms({{-1.0, 0.3}, {0.5, 0.4}, {2.0, 0.3}});
  const Marginal d2 = Marginal::dirac(mu2.mean());
  for (double x : linspace(mu2.mean() + 0.01, 1.99, 40)) {
    EXPECT_NEAR(psi2_star(d2, mu2, x), mu2.beta_at(x), 1e-12) << x;
  }
}

TEST(Psi2Star, ShapeInvariants) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    const Marginal mu2 = test::random_atoms(rng, 6);
    const Marginal mu1 = test::contraction(mu2, 0.5);
    double prev = -1e300;
    for (double x : linspace(mu2.lower(), mu2.upper(), 301)) {
      const double p = psi2_star(mu1, mu2, x);
      EXPECT_GE(p, prev - 1e-12);
      prev = p;
      if (call_price(mu2, x) > call_price(mu1, x) + 1e-12) { EXPECT_LT(p, x); }
      // A larger c1 lowers the root function, so the obstacle sits above beta
      // and meets it where c1 vanishes.
      if (x >= mu2.mean() && x < mu2.upper()) {
        EXPECT_GE(p, mu2.beta_at(x) - 1e-12) << x;
        if (call_price(mu1, x) == 0.0 && call_price(mu2, x) > 1e-12) {
          EXPECT_NEAR(p, mu2.beta_at(x), 1e-12) << x;
        }
      }
    }
  }
}

TEST(Psi2Curve, MatchesPointwiseRoot) {
  const Marginal mu2 = Marginal::from_atoms({{0.0, 0.2}, {0.6, 0.5}, {1.5, 0.3}});
  const Marginal mu1 = test::contraction(mu2, 0.4);
  const MonotoneCurve c = psi2_curve(mu1, mu2);
  for (double x : linspace(mu1.lower(), mu1.upper(), 101)) {
    EXPECT_NEAR(c(x), psi2_star(mu1, mu2, x), 1e-12) << x;
  }
}

TEST(ForwardBound, IdenticalMarginals) {
  for (const Marginal& mu : {unit_uniform(), two_point(), Marginal::lognormal(1.0, 0.3, 1.0)}) {
    for (const Payoff& g : {Payoff::identity(), Payoff::power(2.0)}) {
      const ForwardBoundReport r = forward_bound(mu, mu, g);
      EXPECT_TRUE(r.identical_marginals);
      EXPECT_NEAR(r.bound, expect_g(mu, g), 1e-8) << g.name();
    }
  }
}

TEST(ForwardBound, PointMassReducesToLookback) {
  for (const Marginal& mu2 : {unit_uniform(), two_point(), Marginal::lognormal(1.0, 0.3, 1.0),
                              Marginal::from_atoms({{-1.0, 0.3}, {0.5, 0.4}, {2.0, 0.3}})}) {
    const Marginal d = Marginal::dirac(mu2.mean());
    const ForwardBoundReport r = forward_bound(d, mu2, Payoff::identity());
    EXPECT_NEAR(r.bound, lookback_bound(mu2, Payoff::identity()).bound, 1e-6);
    EXPECT_NEAR(r.bound, r.bound_alt, 1e-7);
  }
  EXPECT_NEAR(forward_bound(Marginal::dirac(0.5), two_point(), Payoff::identity()).bound,
              test::kTwoPointBound, 1e-9);
}

TEST(ForwardBound, ConstantPayoff) {
  const Marginal mu2 = Marginal::from_atoms({{0.0, 0.25}, {1.0, 0.5}, {2.0, 0.25}});
  const ForwardBoundReport r =
      forward_bound(test::contraction(mu2, 0.5), mu2, Payoff::constant(1.75));
  EXPECT_DOUBLE_EQ(r.bound, 1.75);
}

TEST(ForwardBound, OrderViolationCarriesWitness) {
  try {
    (void)forward_bound(unit_uniform(), Marginal::dirac(0.5), Payoff::identity());
    FAIL() << "expected a convex order violation";
  } catch (const ConvexOrderError& e) {
    EXPECT_NEAR(e.witness(), 0.5, 1e-3);
  }
}

TEST(ForwardBound, SandwichAndTwoForms) {
  std::mt19937_64 rng(20260214);
  for (int trial = 0; trial < 10; ++trial) {
    const Marginal mu2 = test::random_atoms(rng);
    std::uniform_real_distribution<double> rho(0.1, 0.9);
    const Marginal mu1 = test::contraction(mu2, rho(rng));
    const Payoff g = trial % 2 == 0 ? Payoff::identity() : Payoff::smoothed_call(mu2.mean(), 0.2);
    const ForwardBoundReport r = forward_bound(mu1, mu2, g);
    EXPECT_TRUE(r.order.ordered);
    EXPECT_NEAR(r.bound, r.bound_alt, 1e-7) << trial;
    EXPECT_GE(r.bound, expect_g(mu1, g) - 1e-9) << trial;
    EXPECT_LE(r.bound, lookback_bound(mu2, g).bound + 1e-9) << trial;
  }
}

TEST(ForwardBound, ContinuousSecondMarginal) {
  const ForwardBoundReport r =
      forward_bound(Marginal::uniform(0.25, 0.75), unit_uniform(), Payoff::identity());
  EXPECT_NEAR(r.bound, r.bound_alt, 1e-7);
  EXPECT_GT(r.bound, 0.5);
  EXPECT_LT(r.bound, 0.75);
  EXPECT_DOUBLE_EQ(r.diagnostics.lower_limit, 0.25);
}

TEST(ForwardIntermediateValue, ConstantPayoffHasNoHedge) {
  const Marginal mu2 = Marginal::from_atoms({{0.0, 0.25}, {1.0, 0.5}, {2.0, 0.25}});
  const Marginal mu1 = test::contraction(mu2, 0.5);
  const Payoff g = Payoff::constant(0.3);
  EXPECT_TRUE(forward_hedge(mu1, mu2, g).is_zero());
  for (double x : {0.6, 1.0, 1.4}) EXPECT_DOUBLE_EQ(forward_intermediate_value(mu1, mu2, g, x), 0.3);
}

TEST(ForwardIntermediateValue, PointMassMatchesLookbackLegs) {
  for (const Marginal& mu2 : {unit_uniform(), two_point()}) {
    const Marginal d = Marginal::dirac(mu2.mean());
    const Payoff g = Payoff::identity();
    const BoundReport lb = lookback_bound(mu2, g);
    const double v = forward_intermediate_value(d, mu2, g, mu2.mean());
    EXPECT_NEAR(v, lb.dynamic_leg, 1e-9);
    EXPECT_NEAR(static_price(mu2, forward_hedge(d, mu2, g)) + v, lb.bound, 1e-6);
  }
}

TEST(ForwardIntermediateValue, DecompositionAndObstacle) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 6; ++trial) {
    const Marginal mu2 = test::random_atoms(rng, 3 + trial);
    const Marginal mu1 = test::contraction(mu2, 0.6);
    for (const Payoff& g : {Payoff::identity(), Payoff::power(2.0)}) {
      if (mu2.lower() < 0.0 && g.name() != "identity") continue;
      const ForwardBoundReport r = forward_bound(mu1, mu2, g);
      const ConvexHedge lam = forward_hedge(mu1, mu2, g);
      double total = static_price(mu2, lam);
      for (const Atom& a : mu1.atoms()) {
        const double v = forward_intermediate_value(mu1, mu2, g, a.level);
        EXPECT_GE(v, g.eval(a.level) - lam(a.level) - 1e-9);
        EXPECT_NEAR(v, v_psi(lam, r.obstacle, g, a.level, a.level), 1e-9);
        total += a.mass * v;
      }
      EXPECT_NEAR(total, r.bound, 1e-8) << trial << " " << g.name();
    }
  }
}

TEST(ForwardIntermediateValue, TouchingCallCurvesAreRejected) {
  // Equal lower endpoints make c1 and c2 coincide below them.
  const Marginal mu2 = Marginal::from_atoms({{0.0, 0.5}, {2.0, 0.5}});
  const Marginal mu1 = Marginal::from_atoms({{0.0, 0.25}, {1.0, 0.5}, {2.0, 0.25}});
  EXPECT_THROW((void)forward_intermediate_value(mu1, mu2, Payoff::identity(), 1.0),
               NumericalError);
}

TEST(SameLaw, DetectsEqualityAcrossRepresentations) {
  const Marginal atoms = Marginal::from_atoms({{0.0, 0.5}, {1.0, 0.5}});
  const std::vector<double> k{0.0, 1.0};
  const std::vector<double> c{0.5, 0.0};
  EXPECT_TRUE(same_law(atoms, Marginal::from_call_curve(k, c)));
  EXPECT_FALSE(same_law(atoms, unit_uniform()));
}

}  // namespace
}  // namespace motb
