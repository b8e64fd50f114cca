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

#include "motb/monotone_curve.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include "motb/error.hpp"

namespace motb {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double edge_slope(const std::vector<CurveKnot>& k, bool left) {
  if (k.size() < 2) return 0.0;
  const CurveKnot& a = left ? k[0] : k[k.size() - 2];
  const CurveKnot& b = left ? k[1] : k[k.size() - 1];
  return (b.y - a.y) / (b.x - a.x);
}

}  // namespace

MonotoneCurve::MonotoneCurve(std::vector<CurveKnot> knots, Direction direction,
                             Interpolation interpolation, Continuity continuity,
                             Extrapolation left, Extrapolation right)
    : knots_(std::move(knots)),
      direction_(direction),
      interpolation_(interpolation),
      continuity_(continuity),
      left_(left),
      right_(right),
      sign_(direction == Direction::kNondecreasing ? 1.0 : -1.0) {
  if (knots_.empty()) throw ValidationError("monotone curve needs at least one knot");
  if (direction_ == Direction::kNonincreasing &&
      (left_ == Extrapolation::kIdentity || right_ == Extrapolation::kIdentity)) {
    throw ValidationError("identity extrapolation requires a nondecreasing curve");
  }
  for (std::size_t i = 0; i < knots_.size(); ++i) {
    if (!std::isfinite(knots_[i].x) || !std::isfinite(knots_[i].y)) {
      throw ValidationError("monotone curve knots must be finite");
    }
    if (i > 0) {
      if (!(knots_[i].x > knots_[i - 1].x)) {
        throw ValidationError("monotone curve abscissae must be strictly increasing");
      }
      if (sign_ * (knots_[i].y - knots_[i - 1].y) < 0.0) {
        throw ValidationError("monotone curve ordinates violate the declared direction");
      }
    }
  }
  for (auto& k : knots_) k.y *= sign_;
}

double MonotoneCurve::operator()(double x) const {
  return sign_ * eval_nondecreasing(x);
}

double MonotoneCurve::eval_nondecreasing(double x) const {
  const auto& k = knots_;
  if (x < k.front().x) {
    switch (left_) {
      case Extrapolation::kConstant: return k.front().y;
      case Extrapolation::kIdentity: return x;
      case Extrapolation::kLinear:
        return k.front().y + edge_slope(k, true) * (x - k.front().x);
    }
  }
  if (x > k.back().x) {
    switch (right_) {
      case Extrapolation::kConstant: return k.back().y;
      case Extrapolation::kIdentity: return x;
      case Extrapolation::kLinear:
        return k.back().y + edge_slope(k, false) * (x - k.back().x);
    }
  }
  // First knot with abscissa >= x.
  auto it = std::lower_bound(k.begin(), k.end(), x,
                             [](const CurveKnot& a, double v) { return a.x < v; });
  const std::size_t i = static_cast<std::size_t>(it - k.begin());
  if (it->x == x) return k[i].y;
  // Here k[i-1].x < x < k[i].x.
  const CurveKnot& a = k[i - 1];
  const CurveKnot& b = k[i];
  if (interpolation_ == Interpolation::kStep) {
    return continuity_ == Continuity::kRight ? a.y : b.y;
  }
  const double t = (x - a.x) / (b.x - a.x);
  return std::clamp(a.y + t * (b.y - a.y), a.y, b.y);
}

double MonotoneCurve::inverse_lower(double y) const {
  return sign_ > 0 ? inverse_nondecreasing(y, false) : inverse_nondecreasing(-y, false);
}

double MonotoneCurve::inverse_upper(double y) const {
  return sign_ > 0 ? inverse_nondecreasing(y, true) : inverse_nondecreasing(-y, true);
}

double MonotoneCurve::inverse_nondecreasing(double y, bool strict) const {
  const auto& k = knots_;
  auto hit = [&](double v) { return strict ? v > y : v >= y; };

  const double x0 = k.front().x;
  const double y0 = k.front().y;
  switch (left_) {
    case Extrapolation::kConstant:
      if (hit(y0)) return -kInf;
      break;
    case Extrapolation::kIdentity:
      if (y < x0) return y;
      break;
    case Extrapolation::kLinear: {
      const double s = edge_slope(k, true);
      if (s > 0.0) {
        const double xs = x0 + (y - y0) / s;
        if (xs < x0) return xs;
      } else if (hit(y0)) {
        return -kInf;
      }
      break;
    }
  }

  for (std::size_t i = 0; i < k.size(); ++i) {
    if (!hit(k[i].y)) continue;
    if (i == 0) return x0;
    if (interpolation_ == Interpolation::kStep) {
      return continuity_ == Continuity::kRight ? k[i].x : k[i - 1].x;
    }
    const CurveKnot& a = k[i - 1];
    const CurveKnot& b = k[i];
    const double t = (y - a.y) / (b.y - a.y);
    return std::clamp(a.x + t * (b.x - a.x), a.x, b.x);
  }

  const double xn = k.back().x;
  const double yn = k.back().y;
  switch (right_) {
    case Extrapolation::kConstant:
      return kInf;
    case Extrapolation::kIdentity:
      return std::max(xn, y);
    case Extrapolation::kLinear: {
      const double s = edge_slope(k, false);
      if (s > 0.0) return std::max(xn, xn + (y - yn) / s);
      return kInf;
    }
  }
  return kInf;
}

void MonotoneCurve::write_csv(std::ostream& os) const {
  const auto old = os.precision();
  os << "x,value\n" << std::setprecision(17);
  for (const auto& k : knots_) os << k.x << ',' << sign_ * k.y << '\n';
  os.precision(old);
}

}  // namespace motb
