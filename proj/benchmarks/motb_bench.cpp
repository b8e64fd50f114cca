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


#include <benchmark/benchmark.h>

#include <cstddef>

#include "motb/dual_solver.hpp"
#include "motb/embedding.hpp"
#include "motb/forward.hpp"
#include "motb/lookback.hpp"

namespace {

motb::Marginal atoms(std::size_t n) {
  std::vector<motb::Atom> a;
  for (std::size_t i = 0; i < n; ++i) {
    a.push_back({static_cast<double>(i) / static_cast<double>(n), 1.0 / static_cast<double>(n)});
  }
  return motb::Marginal::from_atoms(std::move(a));
}

void BM_BoundUniform(benchmark::State& state) {
  const motb::Marginal mu = motb::Marginal::uniform(0.0, 1.0);
  const motb::Payoff g = motb::Payoff::identity();
  for (auto _ : state) benchmark::DoNotOptimize(motb::lookback_bound(mu, g).bound);
}
BENCHMARK(BM_BoundUniform)->Unit(benchmark::kMillisecond);

void BM_BoundLognormal(benchmark::State& state) {
  const motb::Marginal mu = motb::Marginal::lognormal(1.0, 0.3, 1.0);
  const motb::Payoff g = motb::Payoff::identity();
  for (auto _ : state) benchmark::DoNotOptimize(motb::lookback_bound(mu, g).bound);
}
BENCHMARK(BM_BoundLognormal)->Unit(benchmark::kMillisecond);

void BM_BoundAtoms(benchmark::State& state) {
  const motb::Marginal mu = atoms(static_cast<std::size_t>(state.range(0)));
  const motb::Payoff g = motb::Payoff::power(2.0);
  for (auto _ : state) benchmark::DoNotOptimize(motb::lookback_bound(mu, g).bound);
}
BENCHMARK(BM_BoundAtoms)->RangeMultiplier(4)->Range(4, 1024)->Unit(benchmark::kMicrosecond);

void BM_ForwardAtoms(benchmark::State& state) {
  const motb::Marginal mu2 = atoms(static_cast<std::size_t>(state.range(0)));
  std::vector<motb::Atom> inner;
  for (const auto& a : mu2.atoms()) inner.push_back({0.5 * (a.level + mu2.mean()), a.mass});
  const motb::Marginal mu1 = motb::Marginal::from_atoms(std::move(inner));
  const motb::Payoff g = motb::Payoff::identity();
  for (auto _ : state) benchmark::DoNotOptimize(motb::forward_bound(mu1, mu2, g).bound);
}
BENCHMARK(BM_ForwardAtoms)->RangeMultiplier(4)->Range(4, 256)->Unit(benchmark::kMicrosecond);

void BM_DualSolve(benchmark::State& state) {
  const motb::Marginal mu = motb::Marginal::uniform(0.0, 1.0);
  const motb::Payoff g = motb::Payoff::identity();
  const motb::ConvexHedge lambda = motb::lambda_star(mu, g);
  const motb::StoppingGrid grid = motb::make_grid(mu, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(motb::solve_u(lambda, g, grid).value_at_origin);
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_DualSolve)->RangeMultiplier(2)->Range(100, 800)->Complexity()
    ->Unit(benchmark::kMillisecond);

void BM_SimulateUniform(benchmark::State& state) {
  const motb::Marginal mu = motb::Marginal::uniform(0.0, 1.0);
  motb::SimulationConfig cfg;
  cfg.paths = static_cast<std::size_t>(state.range(0));
  cfg.dt = 1e-3;
  cfg.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(motb::simulate(mu, cfg).capped);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulateUniform)->Arg(2000)->Arg(20000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
