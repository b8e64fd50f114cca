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

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "motb/convex_hedge.hpp"
#include "motb/marginal.hpp"
#include "motb/monotone_curve.hpp"
#include "motb/payoff.hpp"

namespace motb {

struct SimulationConfig {
  std::size_t paths = 200000;
  double dt = 1e-4;
  /// Horizon cap; 0 selects max(100 dt, 100 Var(mu)).
  double t_max = 0.0;
  std::uint64_t seed = 20260101;
  bool antithetic = true;
  /// Brownian-bridge correction for the running max and the barrier crossing.
  /// Off gives plain Euler monitoring.
  bool bridge = true;
  /// Worker threads; 0 means hardware concurrency. MOTB_THREADS caps both.
  unsigned threads = 0;
  /// simulate() throws DiagnosticError above this capped fraction.
  double max_capped_fraction = 0.01;
};

struct EmbeddingSample {
  double x_tau = 0.0;
  double m_tau = 0.0;
  double tau = 0.0;
  bool capped = false;
  /// Gains of the dynamic leg, sum_i delta_i (X_{i+1} - X_i). Zero unless a
  /// hedge was attached to the run.
  double hedge_gain = 0.0;
  double x_min = 0.0;  // lowest level visited
  double x_max = 0.0;  // highest level visited
};

struct SimulationResult {
  std::vector<EmbeddingSample> samples;
  std::size_t capped = 0;
  double capped_fraction = 0.0;
  double t_max = 0.0;
  bool antithetic = false;  // samples 2k and 2k+1 are antithetic partners
};

/// Dynamic leg attached to a simulation: delta = semistatic_delta(lambda, psi, g, X, M).
struct HedgeLeg {
  const ConvexHedge* lambda = nullptr;
  const MonotoneCurve* psi = nullptr;
  const Payoff* g = nullptr;
};

/// Effective worker count after applying MOTB_THREADS.
unsigned worker_count(unsigned requested);

/// Paths X = X0 + W stopped when X falls to barrier(M); by default the
/// barrier is beta, which realises the Azema-Yor time. Results depend only
/// on the seed and the configuration, never on the number of workers.
SimulationResult simulate(const Marginal& mu, const SimulationConfig& cfg,
                          const MonotoneCurve* barrier = nullptr, const HedgeLeg* hedge = nullptr);

struct PrimalEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  /// Allowance for discrete monitoring of the max, 0.5826 sqrt(dt) max g'.
  double dt_bias = 0.0;
  std::size_t paths_used = 0;
};

/// Sample mean of g(M_tau) over uncapped paths.
PrimalEstimate primal_estimate(const SimulationResult& sim, const Payoff& g, double dt);
PrimalEstimate primal_estimate(const Marginal& mu, const Payoff& g, const SimulationConfig& cfg);

/// Pathwise slack v0 + int delta dX + lambda(X_tau) - g(M_tau), where the
/// static leg's price mu(lambda) is left out on both sides.
struct SlackSummary {
  double v0 = 0.0;  // v(X0, X0), the dynamic leg
  double mean = 0.0;
  double std_error = 0.0;
  double min = 0.0;
  double q01 = 0.0;
  double q05 = 0.0;
  double q50 = 0.0;
  double tolerance = 0.0;  // 5 sqrt(dt) (1 + max visited |lambda'|)
  double max_abs_slope = 0.0;
  double fraction_below = 0.0;  // share of uncapped paths with slack < -tolerance
  std::size_t paths_used = 0;
};

struct HedgeVerification {
  SimulationResult sim;
  SlackSummary slack;
};

/// Pathwise superhedge check along the Azema-Yor embedding. The hedge is
/// lambda* with barrier beta unless `hedge_barrier` is given, in which case
/// the static leg is rebuilt from that barrier.
HedgeVerification hedge_verify(const Marginal& mu, const Payoff& g, const SimulationConfig& cfg,
                               const MonotoneCurve* hedge_barrier = nullptr);

/// Distribution function of a law as the pair (F(x-), F(x)).
using CdfPair = std::function<std::pair<double, double>(double)>;

/// Kolmogorov-Smirnov distance between the empirical law of `values` and a
/// law that may have atoms.
double ks_statistic(std::vector<double> values, const CdfPair& cdf);
double ks_terminal(const SimulationResult& sim, const Marginal& mu);
double ks_maximum(const SimulationResult& sim, const Marginal& mu);

struct MomentCheck {
  double mean = 0.0;
  double std_error = 0.0;
};
/// Sample mean and standard error of X_tau over uncapped paths.
MomentCheck terminal_mean(const SimulationResult& sim);

/// True when the empirical survival of M_tau dominates that of X_tau at every
/// sample level.
bool max_dominates_terminal(const SimulationResult& sim);

/// CSV "x_tau,m_tau,tau,capped".
void write_samples_csv(std::ostream& os, const SimulationResult& sim);

}  // namespace motb
