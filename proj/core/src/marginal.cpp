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

#include "motb/marginal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "motb/error.hpp"

namespace motb {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMassTol = 1e-12;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double norm_cdf(double d) { return 0.5 * std::erfc(-d / std::numbers::sqrt2); }

double norm_pdf(double d) {
  return std::exp(-0.5 * d * d) / std::sqrt(2.0 * std::numbers::pi);
}

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) throw ValidationError(std::string(what) + " must be finite");
}

}  // namespace

// ---------------------------------------------------------------------------
// Construction

Marginal::Marginal(AtomTable t) : rep_(std::move(t)) {
  const auto& tab = std::get<AtomTable>(rep_);
  mean_ = tab.tail_moment.front();
  lower_ = tab.atoms.front().level;
  upper_ = tab.atoms.back().level;
}

Marginal::Marginal(Uniform u) : rep_(u) {
  mean_ = 0.5 * (u.lo + u.hi);
  lower_ = u.lo;
  upper_ = u.hi;
}

Marginal::Marginal(Lognormal l) : rep_(l) {
  mean_ = l.mean;
  lower_ = 0.0;
  upper_ = kInf;
}

Marginal Marginal::from_atoms(std::vector<Atom> atoms) {
  if (atoms.empty()) throw ValidationError("atoms: at least one atom is required");
  double total = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const auto& a = atoms[i];
    if (!std::isfinite(a.level) || !std::isfinite(a.mass)) {
      throw ValidationError("atoms[" + std::to_string(i) + "]: level and mass must be finite");
    }
    if (!(a.mass > 0.0)) {
      throw ValidationError("atoms[" + std::to_string(i) + "]: mass must be strictly positive");
    }
    total += a.mass;
  }
  if (std::abs(total - 1.0) > kMassTol) {
    throw ValidationError("atoms: masses sum to " + std::to_string(total) + ", expected 1");
  }
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& a, const Atom& b) { return a.level < b.level; });
  std::vector<Atom> merged;
  for (const auto& a : atoms) {
    if (!merged.empty() && merged.back().level == a.level) {
      merged.back().mass += a.mass;
    } else {
      merged.push_back(a);
    }
  }
  for (auto& a : merged) a.mass /= total;

  AtomTable t;
  const std::size_t n = merged.size();
  t.atoms = std::move(merged);
  t.tail_mass.assign(n, 0.0);
  t.tail_moment.assign(n, 0.0);
  t.bary.assign(n, 0.0);
  t.call.assign(n, 0.0);
  CompensatedSum mass;
  CompensatedSum moment;
  for (std::size_t k = n; k-- > 0;) {
    mass.add(t.atoms[k].mass);
    moment.add(t.atoms[k].mass * t.atoms[k].level);
    t.tail_mass[k] = std::min(mass.value(), 1.0);
    t.tail_moment[k] = moment.value();
  }
  t.tail_mass.front() = 1.0;  // masses were normalised; keep the slope in [-1, 0]
  // Conditional means and call prices at the atoms; both built from the top
  // so that c(a_i) = sum_{j>i} p_j (a_j - a_i) has no cancellation.
  CompensatedSum call_acc;
  t.call[n - 1] = 0.0;
  t.bary[n - 1] = t.atoms[n - 1].level;
  for (std::size_t k = n - 1; k-- > 0;) {
    // c(a_k) = c(a_{k+1}) + mu([a_{k+1}, inf)) (a_{k+1} - a_k)
    call_acc.add(t.tail_mass[k + 1] * (t.atoms[k + 1].level - t.atoms[k].level));
    t.call[k] = call_acc.value();
    t.bary[k] = t.atoms[k].level + t.call[k] / t.tail_mass[k];
  }
  t.tail_moment.front() = t.bary.front();  // mean, consistent with the call curve
  return Marginal(std::move(t));
}

Marginal Marginal::from_call_curve(std::span<const double> strikes,
                                   std::span<const double> prices) {
  if (strikes.size() != prices.size()) {
    throw ValidationError("call_curve: strikes and prices differ in length");
  }
  const std::size_t n = strikes.size();
  if (n < 1) throw ValidationError("call_curve: at least one strike is required");
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(strikes[i]) || !std::isfinite(prices[i])) {
      throw ValidationError("call_curve: entry " + std::to_string(i) + " is not finite");
    }
    if (prices[i] < 0.0) {
      throw ValidationError("call_curve: prices[" + std::to_string(i) + "] is negative");
    }
    if (i > 0 && !(strikes[i] > strikes[i - 1])) {
      throw ValidationError("call_curve: strikes must be strictly increasing at index " +
                            std::to_string(i));
    }
  }
  if (std::abs(prices[n - 1]) > 1e-14) {
    throw ValidationError("call_curve: price at the last strike must be 0");
  }
  if (n == 1) throw ValidationError("call_curve: a vanishing single price has no mean");
  constexpr double kSlopeTol = 1e-12;
  std::vector<double> slope(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    slope[i] = (prices[i + 1] - prices[i]) / (strikes[i + 1] - strikes[i]);
    if (slope[i] < -1.0 - kSlopeTol || slope[i] > kSlopeTol) {
      throw ValidationError("call_curve: slope between strikes " + std::to_string(i) + " and " +
                            std::to_string(i + 1) + " lies outside [-1, 0]");
    }
    if (i > 0 && slope[i] < slope[i - 1] - kSlopeTol) {
      throw ValidationError("call_curve: curve is not convex at strike index " +
                            std::to_string(i));
    }
  }
  std::vector<Atom> atoms;
  auto push = [&](double level, double mass) {
    if (mass > 1e-15) atoms.push_back({level, mass});
  };
  push(strikes[0], 1.0 + std::clamp(slope[0], -1.0, 0.0));
  for (std::size_t i = 1; i + 1 < n; ++i) push(strikes[i], slope[i] - slope[i - 1]);
  push(strikes[n - 1], -std::clamp(slope[n - 2], -1.0, 0.0));
  double total = 0.0;
  for (const auto& a : atoms) total += a.mass;
  for (auto& a : atoms) a.mass /= total;
  Marginal mu = from_atoms(std::move(atoms));
  const double implied_mean = prices[0] + strikes[0];
  if (std::abs(mu.mean() - implied_mean) > 1e-9) {
    throw ValidationError("call_curve: mean implied by the first strike (" +
                          std::to_string(implied_mean) + ") disagrees with the atoms (" +
                          std::to_string(mu.mean()) + ")");
  }
  return mu;
}

Marginal Marginal::dirac(double level) {
  require_finite(level, "dirac level");
  return from_atoms({{level, 1.0}});
}

Marginal Marginal::uniform(double lo, double hi) {
  require_finite(lo, "uniform lo");
  require_finite(hi, "uniform hi");
  if (!(hi > lo)) throw ValidationError("uniform: hi must exceed lo");
  return Marginal(Uniform{lo, hi});
}

Marginal Marginal::lognormal(double mean, double vol, double horizon) {
  require_finite(mean, "lognormal mean");
  require_finite(vol, "lognormal vol");
  require_finite(horizon, "lognormal horizon");
  if (!(mean > 0.0)) throw ValidationError("lognormal: mean must be positive");
  if (vol < 0.0 || horizon < 0.0) {
    throw ValidationError("lognormal: vol and horizon must be nonnegative");
  }
  const double stdev = vol * std::sqrt(horizon);
  if (stdev == 0.0) return dirac(mean);
  if (stdev > 5.0) throw ValidationError("lognormal: total volatility above 5 is not supported");
  return Marginal(Lognormal{mean, stdev});
}

// ---------------------------------------------------------------------------
// Queries

Marginal::Kind Marginal::kind() const {
  switch (rep_.index()) {
    case 0: return Kind::kAtoms;
    case 1: return Kind::kUniform;
    default: return Kind::kLognormal;
  }
}

bool Marginal::is_degenerate() const {
  const auto* t = std::get_if<AtomTable>(&rep_);
  return t != nullptr && t->atoms.size() == 1;
}

std::span<const Atom> Marginal::atoms() const {
  if (const auto* t = std::get_if<AtomTable>(&rep_)) return t->atoms;
  return {};
}

namespace {

std::size_t first_at_or_above(const std::vector<Atom>& a, double x) {
  return static_cast<std::size_t>(
      std::lower_bound(a.begin(), a.end(), x,
                       [](const Atom& v, double y) { return v.level < y; }) -
      a.begin());
}

std::size_t first_above(const std::vector<Atom>& a, double x) {
  return static_cast<std::size_t>(
      std::upper_bound(a.begin(), a.end(), x,
                       [](double y, const Atom& v) { return y < v.level; }) -
      a.begin());
}

}  // namespace

double Marginal::call_price(double k) const {
  return std::visit(
      Overloaded{
          [&](const AtomTable& t) {
            const std::size_t i = first_at_or_above(t.atoms, k);
            if (i == t.atoms.size()) return 0.0;
            // c(k) = c(a_i) + mu([a_i, inf)) (a_i - k)
            return t.call[i] + t.tail_mass[i] * (t.atoms[i].level - k);
          },
          [&](const Uniform& u) {
            if (k <= u.lo) return mean_ - k;
            if (k >= u.hi) return 0.0;
            return (u.hi - k) * (u.hi - k) / (2.0 * (u.hi - u.lo));
          },
          [&](const Lognormal& l) {
            if (k <= 0.0) return l.mean - k;
            const double d2 = (std::log(l.mean / k) - 0.5 * l.stdev * l.stdev) / l.stdev;
            const double d1 = d2 + l.stdev;
            return std::max(0.0, l.mean * norm_cdf(d1) - k * norm_cdf(d2));
          },
      },
      rep_);
}

double Marginal::survival(double x) const {
  return std::visit(
      Overloaded{
          [&](const AtomTable& t) {
            const std::size_t i = first_at_or_above(t.atoms, x);
            return i == t.atoms.size() ? 0.0 : t.tail_mass[i];
          },
          [&](const Uniform& u) { return std::clamp((u.hi - x) / (u.hi - u.lo), 0.0, 1.0); },
          [&](const Lognormal& l) {
            if (x <= 0.0) return 1.0;
            return norm_cdf((std::log(l.mean / x) - 0.5 * l.stdev * l.stdev) / l.stdev);
          },
      },
      rep_);
}

double Marginal::survival_strict(double x) const {
  if (const auto* t = std::get_if<AtomTable>(&rep_)) {
    const std::size_t i = first_above(t->atoms, x);
    return i == t->atoms.size() ? 0.0 : t->tail_mass[i];
  }
  return survival(x);
}

double Marginal::call_slope(double k) const { return -survival_strict(k); }

double Marginal::call_slope_left(double k) const { return -survival(k); }

double Marginal::upper_moment(double x) const {
  return std::visit(
      Overloaded{
          [&](const AtomTable& t) {
            const std::size_t i = first_at_or_above(t.atoms, x);
            return i == t.atoms.size() ? 0.0 : t.tail_moment[i];
          },
          [&](const Uniform& u) {
            const double a = std::clamp(x, u.lo, u.hi);
            return (u.hi * u.hi - a * a) / (2.0 * (u.hi - u.lo));
          },
          [&](const Lognormal& l) {
            if (x <= 0.0) return l.mean;
            const double d1 =
                (std::log(l.mean / x) + 0.5 * l.stdev * l.stdev) / l.stdev;
            return l.mean * norm_cdf(d1);
          },
      },
      rep_);
}

double Marginal::barycenter_at(double x) const {
  if (x >= upper_) return x;
  if (x <= lower_) return mean_;
  return std::visit(
      Overloaded{
          [&](const AtomTable& t) { return t.bary[first_at_or_above(t.atoms, x)]; },
          [&](const Uniform& u) { return 0.5 * (x + u.hi); },
          [&](const Lognormal&) {
            const double s = survival(x);
            if (!(s > 0.0)) return x;
            return std::max(x, upper_moment(x) / s);
          },
      },
      rep_);
}

double Marginal::barycenter_right(double x) const {
  if (x >= upper_) return x;
  if (const auto* t = std::get_if<AtomTable>(&rep_)) {
    if (x < lower_) return mean_;
    return t->bary[first_above(t->atoms, x)];
  }
  return barycenter_at(x);
}

double Marginal::beta_at(double x) const {
  if (x < mean_) return lower_;
  if (x >= upper_) return x;
  return std::visit(
      Overloaded{
          [&](const AtomTable& t) {
            // Largest i with b(a_i) <= x; b(a_0) = mean <= x.
            auto it = std::upper_bound(t.bary.begin(), t.bary.end(), x);
            const std::size_t i = static_cast<std::size_t>(it - t.bary.begin()) - 1;
            return t.atoms[i].level;
          },
          [&](const Uniform& u) { return std::clamp(2.0 * x - u.hi, u.lo, x); },
          [&](const Lognormal&) {
            // {y : b(y) <= x} is an interval (-inf, beta(x)] and b(0) = mean.
            return bisect_last_true([&](double y) { return barycenter_at(y) <= x; },
                                    0.0, x, 1e-13 * std::max(1.0, x));
          },
      },
      rep_);
}

double Marginal::hl_survival(double y) const {
  if (y <= mean_) return 1.0;
  if (y > upper_) return 0.0;
  if (const auto* t = std::get_if<AtomTable>(&rep_)) {
    // The transform keeps an atom of mass p_n at the top atom, hence the
    // left limit at y = r.
    auto it = std::upper_bound(t->bary.begin(), t->bary.end(), y);
    std::size_t i = static_cast<std::size_t>(it - t->bary.begin()) - 1;
    i = std::min(i, t->atoms.size() - 2);
    return std::clamp(t->call[i] / (y - t->atoms[i].level), 0.0, 1.0);
  }
  if (y == upper_) return 0.0;
  const double b = beta_at(y);
  return std::clamp(call_price(b) / (y - b), 0.0, 1.0);
}

double Marginal::hl_survival_strict(double y) const {
  if (y >= upper_) return 0.0;
  if (y < mean_) return 1.0;
  return hl_survival(y);
}

Quadrature Marginal::expectation(const ScalarFn& f, std::span<const double> breakpoints,
                                 double abs_tol) const {
  return std::visit(
      Overloaded{
          [&](const AtomTable& t) {
            CompensatedSum s;
            for (const auto& a : t.atoms) s.add(a.mass * f(a.level));
            Quadrature q;
            q.value = s.value();
            q.evaluations = t.atoms.size();
            return q;
          },
          [&](const Uniform& u) {
            const double w = u.hi - u.lo;
            Quadrature q = integrate_piecewise([&](double x) { return f(x) / w; }, u.lo, u.hi,
                                               breakpoints, abs_tol);
            return q;
          },
          [&](const Lognormal& l) {
            // Integrate in the Gaussian coordinate z, X = mean exp(-s^2/2 + s z).
            const double drift = -0.5 * l.stdev * l.stdev;
            std::vector<double> zcuts;
            for (double x : breakpoints) {
              if (x > 0.0) zcuts.push_back((std::log(x / l.mean) - drift) / l.stdev);
            }
            auto h = [&](double z) {
              return f(l.mean * std::exp(drift + l.stdev * z)) * norm_pdf(z);
            };
            return integrate_piecewise(h, -12.0, 12.0, zcuts, abs_tol);
          },
      },
      rep_);
}

std::vector<double> Marginal::breakpoints() const {
  if (const auto* t = std::get_if<AtomTable>(&rep_)) {
    std::vector<double> out;
    out.reserve(t->atoms.size());
    for (const auto& a : t->atoms) out.push_back(a.level);
    return out;
  }
  if (std::isfinite(upper_)) return {lower_, upper_};
  return {lower_};
}

double Marginal::truncation_level(double hl_tail) const {
  if (std::isfinite(upper_)) return upper_;
  double hi = 2.0 * mean_;
  while (hl_survival(hi) > hl_tail) hi *= 2.0;
  return bisect_last_true([&](double y) { return hl_survival(y) > hl_tail; }, mean_, hi,
                          1e-10 * hi) ;
}

double Marginal::survival_quantile(double p) const {
  if (const auto* t = std::get_if<AtomTable>(&rep_)) {
    for (std::size_t i = 0; i < t->atoms.size(); ++i) {
      const double strict = i + 1 < t->atoms.size() ? t->tail_mass[i + 1] : 0.0;
      if (strict <= p) return t->atoms[i].level;
    }
    return upper_;
  }
  if (const auto* u = std::get_if<Uniform>(&rep_)) return u->hi - p * (u->hi - u->lo);
  double hi = 2.0 * mean_;
  while (survival(hi) > p) hi *= 2.0;
  return bisect_last_true([&](double x) { return survival(x) > p; }, 0.0, hi, 1e-14 * hi);
}

// ---------------------------------------------------------------------------
// Free functions

double call_price(const Marginal& mu, double k) {
  require_finite(k, "strike");
  return mu.call_price(k);
}

double call_slope(const Marginal& mu, double k) {
  require_finite(k, "strike");
  return mu.call_slope(k);
}

double hl_survival(const Marginal& mu, double y) {
  require_finite(y, "level");
  return mu.hl_survival(y);
}

MonotoneCurve barycenter(const Marginal& mu) {
  std::vector<CurveKnot> knots;
  switch (mu.kind()) {
    case Marginal::Kind::kAtoms:
      for (const auto& a : mu.atoms()) knots.push_back({a.level, mu.barycenter_at(a.level)});
      return MonotoneCurve(std::move(knots), Direction::kNondecreasing, Interpolation::kStep,
                           Continuity::kLeft, Extrapolation::kConstant, Extrapolation::kIdentity);
    case Marginal::Kind::kUniform:
      knots = {{mu.lower(), mu.mean()}, {mu.upper(), mu.upper()}};
      return MonotoneCurve(std::move(knots), Direction::kNondecreasing, Interpolation::kLinear,
                           Continuity::kRight, Extrapolation::kConstant, Extrapolation::kIdentity);
    case Marginal::Kind::kLognormal: {
      const double top = mu.truncation_level();
      constexpr int kSamples = 2000;
      double prev = -1.0;
      for (int j = 0; j <= kSamples; ++j) {
        const double x = top * static_cast<double>(j) / kSamples;
        const double b = std::max(mu.barycenter_at(x), prev);
        knots.push_back({x, b});
        prev = b;
      }
      return MonotoneCurve(std::move(knots), Direction::kNondecreasing, Interpolation::kLinear,
                           Continuity::kRight, Extrapolation::kConstant, Extrapolation::kLinear);
    }
  }
  throw ValidationError("unknown marginal kind");
}

MonotoneCurve beta(const Marginal& mu) {
  std::vector<CurveKnot> knots;
  switch (mu.kind()) {
    case Marginal::Kind::kAtoms: {
      for (const auto& a : mu.atoms()) {
        const double b = mu.barycenter_at(a.level);
        if (!knots.empty() && !(b > knots.back().x)) {
          knots.back().y = a.level;  // tie: keep the largest minimiser
          continue;
        }
        knots.push_back({b, a.level});
      }
      return MonotoneCurve(std::move(knots), Direction::kNondecreasing, Interpolation::kStep,
                           Continuity::kRight, Extrapolation::kConstant, Extrapolation::kIdentity);
    }
    case Marginal::Kind::kUniform:
      knots = {{mu.mean(), mu.lower()}, {mu.upper(), mu.upper()}};
      return MonotoneCurve(std::move(knots), Direction::kNondecreasing, Interpolation::kLinear,
                           Continuity::kRight, Extrapolation::kConstant, Extrapolation::kIdentity);
    case Marginal::Kind::kLognormal: {
      const double top = mu.truncation_level();
      constexpr int kSamples = 2000;
      for (int j = 0; j <= kSamples; ++j) {
        const double m = mu.mean() + (top - mu.mean()) * static_cast<double>(j) / kSamples;
        const double y = mu.beta_at(m);
        if (!knots.empty()) {
          if (!(m > knots.back().x)) continue;
          knots.push_back({m, std::max(y, knots.back().y)});
        } else {
          knots.push_back({m, y});
        }
      }
      return MonotoneCurve(std::move(knots), Direction::kNondecreasing, Interpolation::kLinear,
                           Continuity::kRight, Extrapolation::kConstant, Extrapolation::kLinear);
    }
  }
  throw ValidationError("unknown marginal kind");
}

std::vector<double> survival_grid(const Marginal& mu, double step, double floor) {
  if (!(step > 0.0 && step < 0.5) || !(floor > 0.0 && floor < 0.5)) {
    throw ValidationError("survival_grid: step and floor must lie in (0, 0.5)");
  }
  if (mu.is_atomic()) return mu.breakpoints();
  std::vector<double> xs{mu.lower()};
  auto push = [&](double s) {
    const double x = mu.survival_quantile(s);
    if (x > xs.back() && x < mu.upper()) xs.push_back(x);
  };
  for (double f = floor; f < 0.5; f /= 1.0 - step) push(1.0 - f);
  for (double s = 0.5; s >= floor; s *= 1.0 - step) push(s);
  return xs;
}

HlExpectation hl_expectation(const Marginal& mu, const Payoff& g, double abs_tol) {
  HlExpectation out;
  const double x0 = mu.mean();
  const double g0 = g.eval(x0);
  if (mu.is_degenerate() || g.is_constant()) {
    out.value = g0;
    out.truncated_at = x0;
    return out;
  }
  const double top = mu.truncation_level();
  out.truncated_at = top;
  std::vector<double> cuts;
  for (const auto& a : mu.atoms()) cuts.push_back(mu.barycenter_at(a.level));
  auto integrand = [&](double y) { return mu.hl_survival(y) * g.deriv(y); };
  const Quadrature q = integrate_piecewise(integrand, x0, top, cuts, abs_tol);
  out.value = g0 + q.value;
  out.error = q.error;
  if (!std::isfinite(mu.upper())) {
    const Quadrature tail = adaptive_simpson(integrand, top, top + (top - x0), abs_tol);
    out.tail_estimate = tail.value;
    if (!std::isfinite(tail.value) || tail.value > std::max(abs_tol, 1e-8)) {
      throw NumericalError("hl_expectation: truncated tail contributes " +
                           std::to_string(tail.value) +
                           "; the bound appears infinite for this payoff");
    }
  }
  if (!std::isfinite(out.value)) throw NumericalError("hl_expectation: non-finite value");
  return out;
}

ConvexOrder check_convex_order(const Marginal& mu1, const Marginal& mu2, double tol) {
  ConvexOrder out;
  const double gap = std::abs(mu1.mean() - mu2.mean());
  if (gap > tol) {
    out.ordered = false;
    out.witness = std::min(mu1.lower(), mu2.lower());
    out.max_violation = gap;
    return out;
  }
  std::vector<double> grid;
  for (double x : mu1.breakpoints()) grid.push_back(x);
  for (double x : mu2.breakpoints()) grid.push_back(x);
  const double lo = std::min(mu1.lower(), mu2.lower());
  const double hi = std::max(mu1.truncation_level(), mu2.truncation_level());
  constexpr int kDense = 4000;
  for (int j = 0; j <= kDense; ++j) grid.push_back(lo + (hi - lo) * j / kDense);
  std::sort(grid.begin(), grid.end());
  out.max_violation = -kInf;
  for (double k : grid) {
    const double v = mu1.call_price(k) - mu2.call_price(k);
    if (v > out.max_violation) {
      out.max_violation = v;
      out.witness = k;
    }
  }
  out.ordered = out.max_violation <= tol;
  return out;
}

}  // namespace motb
