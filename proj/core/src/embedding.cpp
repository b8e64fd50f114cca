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

#include "motb/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <iomanip>
#include <limits>
#include <ostream>
#include <random>
#include <string>
#include <thread>

#include "motb/error.hpp"
#include "motb/lookback.hpp"
#include "motb/quadrature.hpp"

namespace motb {
namespace {

constexpr double kBiasConstant = 0.5826;  // -zeta(1/2) / sqrt(2 pi)

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

void validate(const SimulationConfig& cfg) {
  if (cfg.paths < 1) throw ValidationError("simulation: path count must be at least 1");
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) {
    throw ValidationError("simulation: dt must be positive");
  }
  if (cfg.t_max != 0.0 && !(cfg.t_max >= 100.0 * cfg.dt)) {
    throw ValidationError("simulation: t_max must be at least 100 dt");
  }
  if (!(cfg.max_capped_fraction >= 0.0 && cfg.max_capped_fraction <= 1.0)) {
    throw ValidationError("simulation: max_capped_fraction must lie in [0, 1]");
  }
}

// Hedge state that only changes when the running max moves.
struct HedgeCache {
  double level = 0.0;  // psi(m)
  double slope = 0.0;  // tangent slope s(m)
};

template <class F>
void parallel_for(std::size_t n, unsigned workers, F&& body) {
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
  if (workers <= 1) {
    body(std::size_t{0}, n);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t lo = n * w / workers;
    const std::size_t hi = n * (w + 1) / workers;
    pool.emplace_back([&, w, lo, hi] {
      try {
        body(lo, hi);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
  std::size_t n = 0;
};

// Mean and standard error over the non-NaN entries. Antithetic partners are
// averaged first so that their correlation is accounted for.
MeanSe mean_and_se(const std::vector<double>& v, bool paired) {
  std::vector<double> units;
  std::size_t n = 0;
  const std::size_t step = paired ? 2 : 1;
  for (std::size_t i = 0; i < v.size(); i += step) {
    CompensatedSum s;
    int k = 0;
    for (std::size_t j = i; j < std::min(v.size(), i + step); ++j) {
      if (std::isnan(v[j])) continue;
      s.add(v[j]);
      ++k;
    }
    if (k == 0) continue;
    units.push_back(s.value() / k);
    n += static_cast<std::size_t>(k);
  }
  MeanSe out;
  out.n = n;
  if (units.empty()) return out;
  CompensatedSum s;
  for (double u : units) s.add(u);
  out.mean = s.value() / static_cast<double>(units.size());
  if (units.size() > 1) {
    CompensatedSum ss;
    for (double u : units) ss.add((u - out.mean) * (u - out.mean));
    const double var = ss.value() / static_cast<double>(units.size() - 1);
    out.se = std::sqrt(var / static_cast<double>(units.size()));
  }
  return out;
}

double quantile_sorted(const std::vector<double>& v, double p) {
  if (v.empty()) return 0.0;
  const auto idx = static_cast<std::size_t>(std::floor(p * static_cast<double>(v.size() - 1)));
  return v[idx];
}

}  // namespace

unsigned worker_count(unsigned requested) {
  unsigned n = requested != 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("MOTB_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && cap > 0) n = std::min(n, static_cast<unsigned>(cap));
  }
  return std::max(1u, n);
}

SimulationResult simulate(const Marginal& mu, const SimulationConfig& cfg,
                          const MonotoneCurve* barrier, const HedgeLeg* hedge) {
  validate(cfg);
  const MonotoneCurve own = mu.is_degenerate() ? beta(mu) : optimal_barrier(mu);
  const MonotoneCurve& stop_at = barrier != nullptr ? *barrier : own;
  const double x0 = mu.mean();
  // The discrete maximum can overshoot the top of the support, where a
  // linearly extrapolated barrier would sit above M.
  const double top = mu.upper();
  auto stop_level = [&](double m) { return std::min({stop_at(m), m, top}); };
  double t_max = cfg.t_max;
  if (t_max == 0.0) {
    const double var =
        mu.expectation([&](double x) { return (x - x0) * (x - x0); }).value;
    t_max = std::max(100.0 * cfg.dt, 100.0 * var);
  }
  const auto max_steps = static_cast<std::size_t>(std::ceil(t_max / cfg.dt));
  const double sqrt_dt = std::sqrt(cfg.dt);
  const bool with_hedge = hedge != nullptr && hedge->lambda != nullptr &&
                          hedge->psi != nullptr && hedge->g != nullptr;

  auto refresh = [&](HedgeCache& hc, double m) {
    hc.level = (*hedge->psi)(m);
    hc.slope = tangent_slope(*hedge->lambda, *hedge->psi, *hedge->g, m);
  };

  SimulationResult out;
  out.samples.resize(cfg.paths);
  out.t_max = t_max;

  auto run = [&](std::size_t lo, std::size_t hi) {
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> unif;
    for (std::size_t i = lo; i < hi; ++i) {
      const std::uint64_t stream = cfg.antithetic ? i / 2 : i;
      const double sign = cfg.antithetic && (i % 2 == 1) ? -1.0 : 1.0;
      std::mt19937_64 rng(stream_seed(cfg.seed, stream));
      normal.reset();
      EmbeddingSample s;
      double x = x0;
      double m = x0;
      double barrier_level = stop_level(m);
      HedgeCache hc;
      if (with_hedge) refresh(hc, m);
      CompensatedSum gain;
      s.x_min = s.x_max = x;
      std::size_t step = 0;
      bool stopped = x <= barrier_level;  // a Dirac law stops at time zero
      while (!stopped) {
        if (step == max_steps) {
          s.capped = true;
          break;
        }
        // Three draws per step so that antithetic partners stay aligned.
        const double z = sign * normal(rng);
        const double u_peak = 1.0 - unif(rng);
        const double u_cross = unif(rng);
        const double dx = sqrt_dt * z;
        const double x_next = x + dx;
        double m_next = std::max(m, x_next);
        if (cfg.bridge) {
          const double peak =
              0.5 * (x + x_next + std::sqrt(dx * dx - 2.0 * cfg.dt * std::log(u_peak)));
          m_next = std::max(m, peak);
        }
        ++step;
        if (m_next > m) barrier_level = stop_level(m_next);
        double x_end = x_next;
        if (m_next >= top) {
          // The maximum reached the top of the support inside the step; the
          // continuous path is stopped there with X = M = top.
          m_next = top;
          stopped = true;
          x_end = top;
        } else if (x_next <= barrier_level) {
          stopped = true;
          x_end = barrier_level;
        } else if (cfg.bridge && x > barrier_level) {
          const double p = std::exp(-2.0 * (x - barrier_level) * (x_next - barrier_level) / cfg.dt);
          if (u_cross < p) {
            stopped = true;
            x_end = barrier_level;
          }
        }
        if (with_hedge) {
          // semistatic_delta at (x, m): the tangent slope above psi(m).
          const double delta = x < hc.level ? -hedge->lambda->slope_right(x) : -hc.slope;
          gain.add(delta * (x_end - x));
        }
        x = x_end;
        if (m_next > m) {
          m = m_next;
          if (with_hedge) refresh(hc, m);
        }
        s.x_min = std::min(s.x_min, x);
        s.x_max = std::max(s.x_max, x);
      }
      s.x_tau = x;
      s.m_tau = m;
      s.tau = static_cast<double>(step) * cfg.dt;
      s.hedge_gain = gain.value();
      out.samples[i] = s;
    }
  };
  parallel_for(cfg.paths, worker_count(cfg.threads), run);

  for (const auto& s : out.samples) out.capped += s.capped ? 1 : 0;
  out.capped_fraction = static_cast<double>(out.capped) / static_cast<double>(cfg.paths);
  if (out.capped_fraction > cfg.max_capped_fraction) {
    throw DiagnosticError("simulation: " + std::to_string(out.capped) + " of " +
                          std::to_string(cfg.paths) + " paths reached the horizon cap " +
                          std::to_string(t_max));
  }
  out.antithetic = cfg.antithetic;
  return out;
}

PrimalEstimate primal_estimate(const SimulationResult& sim, const Payoff& g, double dt) {
  std::vector<double> v(sim.samples.size(), std::numeric_limits<double>::quiet_NaN());
  double max_slope = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto& s = sim.samples[i];
    if (s.capped) continue;
    v[i] = g.eval(s.m_tau);
    max_slope = std::max(max_slope, g.deriv(s.m_tau));
  }
  const MeanSe ms = mean_and_se(v, sim.antithetic);
  PrimalEstimate pe;
  pe.mean = ms.mean;
  pe.std_error = ms.se;
  pe.paths_used = ms.n;
  pe.dt_bias = kBiasConstant * std::sqrt(dt) * max_slope;
  return pe;
}

PrimalEstimate primal_estimate(const Marginal& mu, const Payoff& g, const SimulationConfig& cfg) {
  return primal_estimate(simulate(mu, cfg), g, cfg.dt);
}

HedgeVerification hedge_verify(const Marginal& mu, const Payoff& g, const SimulationConfig& cfg,
                               const MonotoneCurve* hedge_barrier) {
  const double x0 = mu.mean();
  const MonotoneCurve beta_curve = mu.is_degenerate() ? beta(mu) : optimal_barrier(mu);
  const MonotoneCurve& psi = hedge_barrier != nullptr ? *hedge_barrier : beta_curve;
  ConvexHedge lambda = ConvexHedge::zero(mu.lower());
  if (hedge_barrier == nullptr) {
    lambda = lambda_star(mu, g);
  } else {
    std::vector<double> m_grid;
    if (psi.interpolation() == Interpolation::kLinear) {
      for (const auto& k : psi.knots()) m_grid.push_back(k.x);
    }
    lambda = hedge_from_barrier(psi, g, m_grid, psi(x0));
  }
  const HedgeLeg leg{&lambda, &psi, &g};

  HedgeVerification out;
  out.sim = simulate(mu, cfg, &beta_curve, &leg);
  SlackSummary& sum = out.slack;
  sum.v0 = v_psi(lambda, psi, g, x0, x0);

  std::vector<double> slack(out.sim.samples.size(), std::numeric_limits<double>::quiet_NaN());
  double lo = x0;
  double hi = x0;
  for (std::size_t i = 0; i < slack.size(); ++i) {
    const auto& s = out.sim.samples[i];
    if (s.capped) continue;
    slack[i] = sum.v0 + s.hedge_gain + lambda(s.x_tau) - g.eval(s.m_tau);
    lo = std::min(lo, s.x_min);
    hi = std::max(hi, s.x_max);
  }
  const MeanSe ms = mean_and_se(slack, out.sim.antithetic);
  sum.mean = ms.mean;
  sum.std_error = ms.se;
  sum.paths_used = ms.n;
  sum.max_abs_slope = lambda.max_abs_slope(lo, hi);
  sum.tolerance = 5.0 * std::sqrt(cfg.dt) * (1.0 + sum.max_abs_slope);

  std::vector<double> sorted;
  sorted.reserve(ms.n);
  for (double v : slack) {
    if (!std::isnan(v)) sorted.push_back(v);
  }
  std::sort(sorted.begin(), sorted.end());
  if (!sorted.empty()) {
    sum.min = sorted.front();
    sum.q01 = quantile_sorted(sorted, 0.01);
    sum.q05 = quantile_sorted(sorted, 0.05);
    sum.q50 = quantile_sorted(sorted, 0.5);
    const auto below = std::lower_bound(sorted.begin(), sorted.end(), -sum.tolerance);
    sum.fraction_below =
        static_cast<double>(below - sorted.begin()) / static_cast<double>(sorted.size());
  }
  return out;
}

double ks_statistic(std::vector<double> values, const CdfPair& cdf) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  double d = 0.0;
  std::size_t i = 0;
  while (i < values.size()) {
    std::size_t j = i;
    while (j < values.size() && values[j] == values[i]) ++j;
    const auto [f_left, f_at] = cdf(values[i]);
    d = std::max(d, std::abs(static_cast<double>(i) / n - f_left));
    d = std::max(d, std::abs(static_cast<double>(j) / n - f_at));
    i = j;
  }
  return d;
}

double ks_terminal(const SimulationResult& sim, const Marginal& mu) {
  std::vector<double> v;
  for (const auto& s : sim.samples) {
    if (!s.capped) v.push_back(s.x_tau);
  }
  return ks_statistic(std::move(v), [&](double x) {
    return std::pair{1.0 - mu.survival(x), 1.0 - mu.survival_strict(x)};
  });
}

double ks_maximum(const SimulationResult& sim, const Marginal& mu) {
  std::vector<double> v;
  for (const auto& s : sim.samples) {
    if (!s.capped) v.push_back(s.m_tau);
  }
  return ks_statistic(std::move(v), [&](double y) {
    return std::pair{1.0 - mu.hl_survival(y), 1.0 - mu.hl_survival_strict(y)};
  });
}

MomentCheck terminal_mean(const SimulationResult& sim) {
  std::vector<double> v(sim.samples.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!sim.samples[i].capped) v[i] = sim.samples[i].x_tau;
  }
  const MeanSe ms = mean_and_se(v, sim.antithetic);
  return {ms.mean, ms.se};
}

bool max_dominates_terminal(const SimulationResult& sim) {
  std::vector<double> xs;
  std::vector<double> ms;
  for (const auto& s : sim.samples) {
    if (s.capped) continue;
    xs.push_back(s.x_tau);
    ms.push_back(s.m_tau);
  }
  std::sort(xs.begin(), xs.end());
  std::sort(ms.begin(), ms.end());
  // Empirical survival at level y is the share of samples >= y; domination
  // holds iff the k-th smallest max is at least the k-th smallest terminal.
  for (std::size_t k = 0; k < xs.size(); ++k) {
    if (ms[k] < xs[k]) return false;
  }
  return true;
}

void write_samples_csv(std::ostream& os, const SimulationResult& sim) {
  os << "x_tau,m_tau,tau,capped\n" << std::setprecision(17);
  for (const auto& s : sim.samples) {
    os << s.x_tau << ',' << s.m_tau << ',' << s.tau << ',' << (s.capped ? 1 : 0) << '\n';
  }
}

}  // namespace motb
