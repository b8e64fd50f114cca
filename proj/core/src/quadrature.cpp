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

#include "motb/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace motb {
namespace {

struct SimpsonState {
  const ScalarFn& f;
  std::size_t evals = 0;
  double err = 0.0;

  double recurse(double a, double b, double fa, double fm, double fb,
                 double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    evals += 2;
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol || !(b - a > 0.0) ||
        m <= a || m >= b) {
      err += std::abs(delta) / 15.0;
      return left + right + delta / 15.0;
    }
    return recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           recurse(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
  }
};

}  // namespace

Quadrature adaptive_simpson(const ScalarFn& f, double a, double b,
                            double abs_tol, int max_depth) {
  Quadrature q;
  if (b < a) {
    q = adaptive_simpson(f, b, a, abs_tol, max_depth);
    q.value = -q.value;
    return q;
  }
  if (!(b > a)) return q;
  SimpsonState st{f};
  const double fa = f(a);
  const double fb = f(b);
  const double m = 0.5 * (a + b);
  const double fm = f(m);
  st.evals = 3;
  // Seed with a split so that integrands vanishing at the three initial
  // abscissae are not accepted as zero.
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  st.evals += 2;
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  double v = 0.0;
  v += st.recurse(a, m, fa, flm, fm, left, 0.5 * abs_tol, max_depth);
  v += st.recurse(m, b, fm, frm, fb, right, 0.5 * abs_tol, max_depth);
  q.value = v;
  q.error = st.err;
  q.evaluations = st.evals;
  return q;
}

Quadrature integrate_piecewise(const ScalarFn& f, double a, double b,
                               std::span<const double> breakpoints,
                               double abs_tol) {
  Quadrature total;
  if (b < a) {
    total = integrate_piecewise(f, b, a, breakpoints, abs_tol);
    total.value = -total.value;
    return total;
  }
  if (!(b > a)) return total;
  std::vector<double> cuts{a};
  for (double x : breakpoints) {
    if (x > a && x < b) cuts.push_back(x);
  }
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  const double width = b - a;
  const double floor_share = 1.0 / static_cast<double>(cuts.size() - 1);
  CompensatedSum sum;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double share = std::max((cuts[i + 1] - cuts[i]) / width, floor_share);
    const double tol = 0.5 * abs_tol * share;
    const Quadrature q = adaptive_simpson(f, cuts[i], cuts[i + 1], tol);
    sum.add(q.value);
    total.error += q.error;
    total.evaluations += q.evaluations;
  }
  total.value = sum.value();
  return total;
}

void CompensatedSum::add(double x) noexcept {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    comp_ += (sum_ - t) + x;
  } else {
    comp_ += (x - t) + sum_;
  }
  sum_ = t;
}

double bisect_last_true(const std::function<bool(double)>& pred, double lo,
                        double hi, double x_tol, int max_iter) {
  if (pred(hi)) return hi;
  for (int i = 0; i < max_iter && hi - lo > x_tol; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (pred(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

}  // namespace motb
