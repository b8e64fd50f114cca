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

#include "motb/convex_hedge.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <string>

#include "motb/error.hpp"

namespace motb {
namespace {

constexpr double kConvexTol = 1e-12;

}  // namespace

ConvexHedge::ConvexHedge(std::vector<HedgeKnot> knots, double anchor)
    : knots_(std::move(knots)), anchor_(anchor) {}

ConvexHedge ConvexHedge::zero(double anchor) {
  return ConvexHedge({{anchor, 0.0, 0.0, 0.0}}, anchor);
}

ConvexHedge ConvexHedge::from_slopes(std::vector<double> x, std::vector<double> slope_left,
                                     std::vector<double> slope_right, double anchor) {
  const std::size_t n = x.size();
  if (n == 0 || slope_left.size() != n || slope_right.size() != n) {
    throw ValidationError("hedge: knot arrays must be non-empty and of equal length");
  }
  if (!std::isfinite(anchor)) throw ValidationError("hedge: anchor must be finite");
  std::vector<HedgeKnot> k(n);
  for (std::size_t j = 0; j < n; ++j) {
    if (!std::isfinite(x[j]) || !std::isfinite(slope_left[j]) || !std::isfinite(slope_right[j])) {
      throw ValidationError("hedge: knot " + std::to_string(j) + " is not finite");
    }
    if (j > 0 && !(x[j] > x[j - 1])) {
      throw ValidationError("hedge: knots must be strictly increasing at " + std::to_string(j));
    }
    const double scale = 1.0 + std::abs(slope_right[j]);
    if (slope_right[j] < slope_left[j] - kConvexTol * scale) {
      throw ValidationError("hedge: negative slope jump at knot " + std::to_string(j));
    }
    if (j > 0 && slope_left[j] < slope_right[j - 1] - kConvexTol * scale) {
      throw ValidationError("hedge: decreasing slope before knot " + std::to_string(j));
    }
    k[j] = {x[j], 0.0, slope_left[j], std::max(slope_left[j], slope_right[j])};
    if (j > 0) k[j].slope_left = std::max(k[j].slope_left, k[j - 1].slope_right);
  }
  // Slopes are linear on each gap, so the trapezoid rule is exact.
  CompensatedSum acc;
  for (std::size_t j = 1; j < n; ++j) {
    acc.add(0.5 * (k[j - 1].slope_right + k[j].slope_left) * (k[j].x - k[j - 1].x));
    k[j].value = acc.value();
  }
  ConvexHedge h(std::move(k), anchor);
  const double shift = h.raw_value(anchor);
  for (auto& kn : h.knots_) kn.value -= shift;
  return h;
}

ConvexHedge ConvexHedge::from_kinks(std::span<const double> kappa,
                                    std::span<const double> weights, double anchor) {
  if (kappa.size() != weights.size() || kappa.empty()) {
    throw ValidationError("hedge: kinks and weights must be non-empty and of equal length");
  }
  std::vector<double> x;
  std::vector<double> sl;
  std::vector<double> sr;
  double slope = 0.0;
  for (std::size_t k = 0; k < kappa.size(); ++k) {
    if (!(weights[k] >= 0.0)) throw ValidationError("hedge: kink weights must be nonnegative");
    if (k > 0 && !(kappa[k] > kappa[k - 1])) {
      throw ValidationError("hedge: kinks must be strictly increasing");
    }
    x.push_back(kappa[k]);
    sl.push_back(slope);
    slope += weights[k];
    sr.push_back(slope);
  }
  ConvexHedge h = from_slopes(std::move(x), std::move(sl), std::move(sr), anchor);
  // Keep the call-spread normalisation: lambda vanishes left of the first kink.
  const double shift = h.raw_value(kappa.front());
  for (auto& kn : h.knots_) kn.value -= shift;
  return h;
}

double ConvexHedge::raw_value(double x) const {
  const auto& k = knots_;
  auto it = std::upper_bound(k.begin(), k.end(), x,
                             [](double v, const HedgeKnot& kn) { return v < kn.x; });
  if (it == k.begin()) return k.front().value + k.front().slope_left * (x - k.front().x);
  const auto& a = *(it - 1);
  const double d = x - a.x;
  if (it == k.end()) return a.value + a.slope_right * d;
  const auto& b = *it;
  const double w = b.x - a.x;
  return a.value + a.slope_right * d + 0.5 * (b.slope_left - a.slope_right) * d * d / w;
}

double ConvexHedge::operator()(double x) const { return raw_value(x); }

double ConvexHedge::slope_right(double x) const {
  const auto& k = knots_;
  auto it = std::upper_bound(k.begin(), k.end(), x,
                             [](double v, const HedgeKnot& kn) { return v < kn.x; });
  if (it == k.begin()) return k.front().slope_left;
  const auto& a = *(it - 1);
  if (it == k.end() || x == a.x) return a.slope_right;
  const auto& b = *it;
  return a.slope_right + (b.slope_left - a.slope_right) * (x - a.x) / (b.x - a.x);
}

double ConvexHedge::slope_left(double x) const {
  const long j = knot_index(x);
  if (j >= 0) return knots_[static_cast<std::size_t>(j)].slope_left;
  return slope_right(x);
}

double ConvexHedge::density(double x) const {
  const auto& k = knots_;
  auto it = std::upper_bound(k.begin(), k.end(), x,
                             [](double v, const HedgeKnot& kn) { return v < kn.x; });
  if (it == k.begin() || it == k.end()) return 0.0;
  const auto& a = *(it - 1);
  return (it->slope_left - a.slope_right) / (it->x - a.x);
}

long ConvexHedge::knot_index(double x) const {
  auto it = std::lower_bound(knots_.begin(), knots_.end(), x,
                             [](const HedgeKnot& kn, double v) { return kn.x < v; });
  if (it == knots_.end() || it->x != x) return -1;
  return static_cast<long>(it - knots_.begin());
}

bool ConvexHedge::is_zero() const {
  return std::all_of(knots_.begin(), knots_.end(), [](const HedgeKnot& k) {
    return k.value == 0.0 && k.slope_left == 0.0 && k.slope_right == 0.0;
  });
}

double ConvexHedge::max_abs_slope(double lo, double hi) const {
  // lambda' is monotone, so the extremes sit at the ends.
  return std::max(std::abs(slope_left(lo)), std::abs(slope_right(hi)));
}

ConvexHedge ConvexHedge::scaled(double factor) const {
  if (!(factor >= 0.0)) throw ValidationError("hedge: scale factor must be nonnegative");
  ConvexHedge out = *this;
  for (auto& k : out.knots_) {
    k.value *= factor;
    k.slope_left *= factor;
    k.slope_right *= factor;
  }
  return out;
}

void ConvexHedge::write_csv(std::ostream& os) const {
  os << "x,value\n" << std::setprecision(17);
  for (const auto& k : knots_) os << k.x << ',' << k.value << '\n';
}

double static_price(const Marginal& mu, const ConvexHedge& lambda) {
  auto f = [&](double x) { return lambda(x); };
  if (mu.is_atomic()) return mu.expectation(f).value;
  std::vector<double> cuts;
  if (mu.kind() == Marginal::Kind::kUniform) {
    for (const auto& k : lambda.knots()) cuts.push_back(k.x);
  }
  const Quadrature q = mu.expectation(f, cuts, 1e-11);
  if (!std::isfinite(q.value)) throw NumericalError("static_price: hedge is not integrable");
  return q.value;
}

double static_price_via_calls(const Marginal& mu, const ConvexHedge& lambda) {
  const double x0 = mu.mean();
  auto excess = [&](double y) { return mu.call_price(y) - std::max(x0 - y, 0.0); };
  const auto knots = lambda.knots();
  CompensatedSum total;
  total.add(lambda(x0));
  std::vector<double> cuts = mu.breakpoints();
  cuts.push_back(x0);
  std::sort(cuts.begin(), cuts.end());
  for (std::size_t j = 0; j < knots.size(); ++j) {
    total.add(excess(knots[j].x) * (knots[j].slope_right - knots[j].slope_left));
    if (j + 1 == knots.size()) break;
    const double rho = (knots[j + 1].slope_left - knots[j].slope_right) /
                       (knots[j + 1].x - knots[j].x);
    if (rho == 0.0) continue;
    const double a = knots[j].x;
    const double b = knots[j + 1].x;
    auto lo = std::upper_bound(cuts.begin(), cuts.end(), a);
    auto hi = std::lower_bound(cuts.begin(), cuts.end(), b);
    const std::span<const double> inner(lo, hi);
    total.add(rho * integrate_piecewise(excess, a, b, inner, 1e-14 + 1e-12 * (b - a)).value);
  }
  return total.value();
}

}  // namespace motb
