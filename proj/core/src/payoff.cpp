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

#include "motb/payoff.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "motb/error.hpp"

namespace motb {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Index of the interval [k[i], k[i+1]] containing x, for x inside the range.
std::size_t segment(const std::vector<Payoff::TabulatedKnot>& k, double x) {
  auto it = std::upper_bound(k.begin(), k.end(), x,
                             [](double v, const Payoff::TabulatedKnot& a) { return v < a.x; });
  std::size_t i = static_cast<std::size_t>(it - k.begin());
  return std::min(i == 0 ? 0 : i - 1, k.size() - 2);
}

double hermite_value(const Payoff::TabulatedKnot& a, const Payoff::TabulatedKnot& b, double x) {
  const double h = b.x - a.x;
  const double t = (x - a.x) / h;
  const double t2 = t * t;
  const double t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * a.g + (t3 - 2 * t2 + t) * h * a.dg +
         (-2 * t3 + 3 * t2) * b.g + (t3 - t2) * h * b.dg;
}

double hermite_deriv(const Payoff::TabulatedKnot& a, const Payoff::TabulatedKnot& b, double x) {
  const double h = b.x - a.x;
  const double t = (x - a.x) / h;
  const double t2 = t * t;
  return ((6 * t2 - 6 * t) * a.g + (-6 * t2 + 6 * t) * b.g) / h +
         (3 * t2 - 4 * t + 1) * a.dg + (3 * t2 - 2 * t) * b.dg;
}

}  // namespace

Payoff Payoff::power(double exponent) {
  if (!std::isfinite(exponent) || exponent < 1.0) {
    throw ValidationError("power payoff: exponent must be finite and >= 1");
  }
  return Payoff(Power{exponent});
}

Payoff Payoff::smoothed_call(double strike, double eps) {
  if (!std::isfinite(strike)) throw ValidationError("smoothed_call: strike must be finite");
  if (!std::isfinite(eps) || !(eps > 0.0)) {
    throw ValidationError("smoothed_call: eps must be positive");
  }
  return Payoff(SmoothedCall{strike, eps});
}

Payoff Payoff::constant(double level) {
  return tabulated({{0.0, level, 0.0}});
}

Payoff Payoff::tabulated(std::vector<TabulatedKnot> knots) {
  if (knots.empty()) throw ValidationError("tabulated payoff: needs at least one knot");
  for (std::size_t i = 0; i < knots.size(); ++i) {
    const auto& k = knots[i];
    if (!std::isfinite(k.x) || !std::isfinite(k.g) || !std::isfinite(k.dg)) {
      throw ValidationError("tabulated payoff: knot " + std::to_string(i) + " is not finite");
    }
    if (k.g < 0.0) {
      throw ValidationError("tabulated payoff: knot " + std::to_string(i) + " has g < 0");
    }
    if (k.dg < 0.0) {
      throw ValidationError("tabulated payoff: knot " + std::to_string(i) + " has dg < 0");
    }
    if (i == 0) continue;
    const auto& a = knots[i - 1];
    if (!(k.x > a.x)) {
      throw ValidationError("tabulated payoff: abscissae must be strictly increasing");
    }
    if (k.g < a.g) {
      throw ValidationError("tabulated payoff: values must be nondecreasing at knot " +
                            std::to_string(i));
    }
    // Fritsch-Carlson sufficient condition for a monotone cubic Hermite piece.
    const double secant = (k.g - a.g) / (k.x - a.x);
    if (secant == 0.0) {
      if (a.dg != 0.0 || k.dg != 0.0) {
        throw ValidationError("tabulated payoff: flat interval ending at knot " +
                              std::to_string(i) + " needs zero derivatives");
      }
    } else {
      const double alpha = a.dg / secant;
      const double beta = k.dg / secant;
      if (alpha * alpha + beta * beta > 9.0) {
        throw ValidationError("tabulated payoff: derivatives at knot " + std::to_string(i) +
                              " would make the interpolant non-monotone");
      }
    }
  }
  return Payoff(Tabulated{std::move(knots)});
}

double Payoff::eval(double x) const {
  return std::visit(
      Overloaded{
          [x](const Identity&) { return x; },
          [x](const Power& p) { return x > 0.0 ? std::pow(x, p.exponent) : 0.0; },
          [x](const SmoothedCall& c) {
            if (x <= c.strike - c.eps) return 0.0;
            if (x >= c.strike + c.eps) return x - c.strike;
            const double u = x - c.strike + c.eps;
            return u * u / (4.0 * c.eps);
          },
          [x](const Tabulated& t) {
            const auto& k = t.knots;
            if (x <= k.front().x) return k.front().g + k.front().dg * (x - k.front().x);
            if (x >= k.back().x) return k.back().g + k.back().dg * (x - k.back().x);
            const std::size_t i = segment(k, x);
            return hermite_value(k[i], k[i + 1], x);
          },
      },
      kind_);
}

double Payoff::deriv(double x) const {
  return std::visit(
      Overloaded{
          [](const Identity&) { return 1.0; },
          [x](const Power& p) {
            if (x <= 0.0) return p.exponent == 1.0 && x == 0.0 ? 1.0 : 0.0;
            return p.exponent * std::pow(x, p.exponent - 1.0);
          },
          [x](const SmoothedCall& c) {
            if (x <= c.strike - c.eps) return 0.0;
            if (x >= c.strike + c.eps) return 1.0;
            return (x - c.strike + c.eps) / (2.0 * c.eps);
          },
          [x](const Tabulated& t) {
            const auto& k = t.knots;
            if (x <= k.front().x) return k.front().dg;
            if (x >= k.back().x) return k.back().dg;
            const std::size_t i = segment(k, x);
            return std::max(0.0, hermite_deriv(k[i], k[i + 1], x));
          },
      },
      kind_);
}

bool Payoff::is_constant() const {
  if (const auto* t = std::get_if<Tabulated>(&kind_)) {
    return std::all_of(t->knots.begin(), t->knots.end(),
                       [](const TabulatedKnot& k) { return k.dg == 0.0; }) &&
           std::all_of(t->knots.begin(), t->knots.end(),
                       [&](const TabulatedKnot& k) { return k.g == t->knots.front().g; });
  }
  return false;
}

std::string Payoff::name() const {
  std::ostringstream os;
  std::visit(Overloaded{
                 [&](const Identity&) { os << "identity"; },
                 [&](const Power& p) { os << "power(" << p.exponent << ")"; },
                 [&](const SmoothedCall& c) {
                   os << "smoothed_call(" << c.strike << "," << c.eps << ")";
                 },
                 [&](const Tabulated& t) { os << "tabulated[" << t.knots.size() << "]"; },
             },
             kind_);
  return os.str();
}

}  // namespace motb
