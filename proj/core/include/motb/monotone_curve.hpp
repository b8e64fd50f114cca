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

#include <iosfwd>
#include <span>
#include <vector>

namespace motb {

enum class Direction { kNondecreasing, kNonincreasing };
enum class Interpolation { kLinear, kStep };
/// Which side a step curve takes at a knot. Ignored for linear curves.
enum class Continuity { kLeft, kRight };
enum class Extrapolation { kConstant, kIdentity, kLinear };

struct CurveKnot {
  double x;
  double y;
};

/// A monotone function of one variable known through knots.
///
/// Between knots the curve is either linear (never overshoots the bracketing
/// ordinates) or a step. Step curves use the declared continuity at knots:
/// right-continuous curves take y[i] on [x[i], x[i+1]), left-continuous ones
/// take y[i] on (x[i-1], x[i]]. Outside the knot range each end follows its
/// own extrapolation rule.
///
/// Holds the barycenter b, its inverse beta, free boundaries psi and survival
/// curves.
class MonotoneCurve {
 public:
  MonotoneCurve(std::vector<CurveKnot> knots, Direction direction,
                Interpolation interpolation, Continuity continuity,
                Extrapolation left, Extrapolation right);

  [[nodiscard]] double operator()(double x) const;

  /// Nondecreasing: inf{x : f(x) >= y}. Nonincreasing: inf{x : f(x) <= y}.
  /// Returns -inf/+inf when the set is unbounded below / empty.
  [[nodiscard]] double inverse_lower(double y) const;
  /// Nondecreasing: inf{x : f(x) > y}. Nonincreasing: inf{x : f(x) < y}.
  [[nodiscard]] double inverse_upper(double y) const;

  [[nodiscard]] std::span<const CurveKnot> knots() const { return knots_; }
  [[nodiscard]] Direction direction() const { return direction_; }
  [[nodiscard]] Interpolation interpolation() const { return interpolation_; }
  [[nodiscard]] Continuity continuity() const { return continuity_; }
  [[nodiscard]] double front_x() const { return knots_.front().x; }
  [[nodiscard]] double back_x() const { return knots_.back().x; }

  /// CSV with header "x,value", one row per knot, 17 significant digits.
  void write_csv(std::ostream& os) const;

 private:
  double eval_nondecreasing(double x) const;
  double inverse_nondecreasing(double y, bool strict) const;

  std::vector<CurveKnot> knots_;
  Direction direction_;
  Interpolation interpolation_;
  Continuity continuity_;
  Extrapolation left_;
  Extrapolation right_;
  double sign_;  // +1 or -1: curves are stored internally as nondecreasing
};

}  // namespace motb
