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
#include "motb/payoff.hpp"
#include "test_support.hpp"

namespace motb {
namespace {

std::vector<Payoff> family() {
  return {Payoff::identity(), Payoff::power(2.0), Payoff::power(1.5),
          Payoff::smoothed_call(1.0, 0.1),
          Payoff::tabulated({{0.0, 0.0, 0.5}, {1.0, 1.0, 1.5}, {2.0, 3.0, 2.5}})};
}

TEST(PayoffEval, Examples) {
  EXPECT_DOUBLE_EQ(Payoff::identity().eval(0.75), 0.75);
  EXPECT_DOUBLE_EQ(Payoff::smoothed_call(1.0, 0.1).eval(0.9), 0.0);
  EXPECT_DOUBLE_EQ(Payoff::smoothed_call(1.0, 0.1).eval(0.5), 0.0);
  EXPECT_DOUBLE_EQ(Payoff::power(2.0).eval(0.5), 0.25);
}

TEST(PayoffDeriv, Examples) {
  for (double x : {-3.0, 0.0, 0.5, 10.0}) EXPECT_DOUBLE_EQ(Payoff::identity().deriv(x), 1.0);
  EXPECT_DOUBLE_EQ(Payoff::power(2.0).deriv(0.5), 1.0);
  const Payoff call = Payoff::smoothed_call(1.0, 0.1);
  for (double x : {1.1, 1.5, 7.0}) EXPECT_DOUBLE_EQ(call.deriv(x), 1.0);
  EXPECT_NEAR(call.eval(1.5), 0.5, 1e-15);
}

TEST(PayoffDeriv, MatchesFiniteDifferences) {
  for (const Payoff& g : family()) {
    for (double x : test::linspace(-0.5, 2.5, 61)) {
      // Skip the tabulated knots and the ends of the smoothing window, where g''
      // jumps and central differences lose O(h).
      if (std::abs(x - std::round(x)) < 1e-9) continue;
      if (std::abs(x - 0.9) < 1e-9 || std::abs(x - 1.1) < 1e-9) continue;
      const double h = 1e-6;
      const double fd = (g.eval(x + h) - g.eval(x - h)) / (2.0 * h);
      EXPECT_NEAR(g.deriv(x), fd, 1e-6 * std::max(1.0, std::abs(fd))) << g.name() << " at " << x;
    }
  }
}

// Nonnegativity is only asserted on [0, inf): the identity is allowed to go
// negative on laws with negative support.
TEST(PayoffShape, NondecreasingNonnegativeContinuousDerivative) {
  for (const Payoff& g : family()) {
    double prev = g.eval(-1.0);
    for (double x : test::linspace(-1.0, 3.0, 4001)) {
      if (x >= 0.0) { EXPECT_GE(g.eval(x), 0.0) << g.name(); }
      EXPECT_GE(g.eval(x), prev) << g.name();
      EXPECT_GE(g.deriv(x), 0.0) << g.name();
      EXPECT_LT(std::abs(g.deriv(x + 1e-9) - g.deriv(x - 1e-9)), 1e-3) << g.name() << " jump at " << x;
      prev = g.eval(x);
    }
  }
}

TEST(PayoffValidation, RejectsInvalidParameters) {
  EXPECT_THROW(Payoff::power(0.5), ValidationError);
  EXPECT_THROW(Payoff::smoothed_call(1.0, 0.0), ValidationError);
  EXPECT_THROW(Payoff::tabulated({}), ValidationError);
  EXPECT_THROW(Payoff::tabulated({{0.0, 1.0, 1.0}, {1.0, 0.5, 1.0}}), ValidationError);
  EXPECT_THROW(Payoff::tabulated({{0.0, -1.0, 1.0}, {1.0, 0.5, 1.0}}), ValidationError);
  EXPECT_THROW(Payoff::tabulated({{0.0, 0.0, -1.0}, {1.0, 0.5, 1.0}}), ValidationError);
}

TEST(PayoffConstant, HasZeroDerivative) {
  const Payoff c = Payoff::constant(2.5);
  EXPECT_TRUE(c.is_constant());
  EXPECT_FALSE(Payoff::identity().is_constant());
  EXPECT_DOUBLE_EQ(c.eval(-4.0), 2.5);
  EXPECT_DOUBLE_EQ(c.eval(9.0), 2.5);
  EXPECT_DOUBLE_EQ(c.deriv(1.0), 0.0);
}

}  // namespace
}  // namespace motb
