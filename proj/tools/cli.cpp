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


#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "motb/dual_solver.hpp"
#include "motb/embedding.hpp"
#include "motb/error.hpp"
#include "motb/forward.hpp"
#include "motb/lookback.hpp"
#include "motb/marginal.hpp"
#include "motb/payoff.hpp"
#include "motb/spec_io.hpp"

namespace motb::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

constexpr std::size_t kCurveSamples = 1001;

struct RunConfig {
  std::vector<std::string> marginals;
  std::string payoff;
  std::string out = ".";
  std::uint64_t seed = 20260101;
  std::size_t paths = 200000;
  double dt = 1e-4;
  std::size_t grid = 400;
  double tol = 0.01;
  bool tol_set = false;
  bool euler = false;
  bool cold_start = false;
  std::size_t knots = 16;
};

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json header(const char* command) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = command;
  return j;
}

std::string kind_name(Marginal::Kind k) {
  switch (k) {
    case Marginal::Kind::kAtoms:
      return "atoms";
    case Marginal::Kind::kUniform:
      return "uniform";
    case Marginal::Kind::kLognormal:
      return "lognormal";
  }
  return "unknown";
}

json describe(const Marginal& mu, const std::string& path) {
  json j;
  j["path"] = path;
  j["kind"] = kind_name(mu.kind());
  j["mean"] = mu.mean();
  j["lower"] = finite_or_null(mu.lower());
  j["upper"] = finite_or_null(mu.upper());
  if (mu.is_atomic()) j["atoms"] = mu.atoms().size();
  return j;
}

fs::path prepare_out(const std::string& dir) {
  fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec || !fs::is_directory(p)) throw IoError("cannot create output directory " + dir);
  return p;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot write " + path.string());
  os << std::setprecision(17);
  return os;
}

void close_out(std::ofstream& os, const fs::path& path) {
  os.flush();
  if (!os) throw IoError("write failed for " + path.string());
}

void write_json(const fs::path& path, const json& j) {
  auto os = open_out(path);
  os << j.dump(2) << '\n';
  close_out(os, path);
}

template <class F>
void write_sampled(const fs::path& path, double lo, double hi, F&& f) {
  auto os = open_out(path);
  os << "x,value\n";
  for (std::size_t i = 0; i < kCurveSamples; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / (kCurveSamples - 1);
    os << x << ',' << f(x) << '\n';
  }
  close_out(os, path);
}

template <class W>
void write_with(const fs::path& path, W&& writer) {
  auto os = open_out(path);
  writer(os);
  close_out(os, path);
}

// Plotting window: the support of mu padded by 5%, or the truncation level
// when the support is unbounded.
std::pair<double, double> plot_range(const Marginal& mu) {
  const double lo = mu.lower();
  const double hi = std::isfinite(mu.upper()) ? mu.upper() : mu.truncation_level(1e-6);
  const double w = hi > lo ? hi - lo : 1.0;
  return {lo - 0.05 * w, hi + 0.05 * w};
}

void require_marginals(const RunConfig& cfg, std::size_t count, const char* command) {
  if (cfg.marginals.size() != count) {
    throw ValidationError(std::string(command) + " expects " + std::to_string(count) +
                          " --marginal argument" + (count == 1 ? "" : "s") + ", got " +
                          std::to_string(cfg.marginals.size()));
  }
}

Payoff load_payoff_or_identity(const RunConfig& cfg) {
  return cfg.payoff.empty() ? Payoff::identity() : load_payoff(cfg.payoff);
}

int cmd_bound(const RunConfig& cfg, std::ostream& out) {
  require_marginals(cfg, 1, "bound");
  const Marginal mu = load_marginal(cfg.marginals[0]);
  const Payoff g = load_payoff_or_identity(cfg);
  const fs::path dir = prepare_out(cfg.out);

  const BoundReport rep = lookback_bound(mu, g);

  json j = header("bound");
  j["marginal"] = describe(mu, cfg.marginals[0]);
  j["payoff"] = g.name();
  j["bound"] = rep.bound;
  j["static_leg"] = rep.static_leg;
  j["dynamic_leg"] = rep.dynamic_leg;
  j["tolerances"] = {{"quadrature_error", rep.diagnostics.quadrature_error},
                     {"tail_estimate", rep.diagnostics.tail_estimate},
                     {"decomposition_residual", rep.diagnostics.decomposition_residual}};
  j["artifacts"] = {"lambda_star.csv", "barycenter.csv", "beta.csv", "hl_survival.csv",
                    "diagnostics.json"};
  write_json(dir / "report.json", j);

  json d = header("bound");
  d["quadrature_error"] = rep.diagnostics.quadrature_error;
  d["truncated_at"] = finite_or_null(rep.diagnostics.truncated_at);
  d["tail_estimate"] = rep.diagnostics.tail_estimate;
  d["decomposition_residual"] = rep.diagnostics.decomposition_residual;
  d["hedge_knots"] = rep.diagnostics.hedge_knots;
  write_json(dir / "diagnostics.json", d);

  write_with(dir / "lambda_star.csv", [&](std::ostream& os) { rep.hedge.write_csv(os); });
  const auto [lo, hi] = plot_range(mu);
  write_sampled(dir / "barycenter.csv", lo, hi, [&](double x) { return mu.barycenter_at(x); });
  write_sampled(dir / "beta.csv", mu.mean(), std::max(hi, mu.mean()),
                [&](double x) { return mu.beta_at(x); });
  write_sampled(dir / "hl_survival.csv", lo, hi, [&](double y) { return mu.hl_survival(y); });

  out << std::setprecision(17) << "bound " << rep.bound << '\n';
  return kOk;
}

int cmd_forward(const RunConfig& cfg, std::ostream& out) {
  require_marginals(cfg, 2, "forward");
  const Marginal mu1 = load_marginal(cfg.marginals[0]);
  const Marginal mu2 = load_marginal(cfg.marginals[1]);
  const Payoff g = load_payoff_or_identity(cfg);
  const fs::path dir = prepare_out(cfg.out);

  const ForwardBoundReport rep = forward_bound(mu1, mu2, g);

  json j = header("forward");
  j["marginals"] = {describe(mu1, cfg.marginals[0]), describe(mu2, cfg.marginals[1])};
  j["payoff"] = g.name();
  j["bound"] = rep.bound;
  j["bound_alt"] = rep.bound_alt;
  j["identical_marginals"] = rep.identical_marginals;
  j["order"] = {{"ordered", rep.order.ordered},
                {"max_violation", rep.order.max_violation},
                {"witness", rep.order.witness}};
  j["artifacts"] = {"psi2.csv", "diagnostics.json"};
  write_json(dir / "report.json", j);

  json d = header("forward");
  d["quadrature_error"] = rep.diagnostics.quadrature_error;
  d["lower_limit"] = finite_or_null(rep.diagnostics.lower_limit);
  d["upper_limit"] = finite_or_null(rep.diagnostics.upper_limit);
  d["tail_integrand"] = rep.diagnostics.tail_integrand;
  d["form_gap"] = std::abs(rep.bound - rep.bound_alt);
  write_json(dir / "diagnostics.json", d);

  const double lo = mu1.lower();
  const double hi = std::isfinite(mu1.upper()) ? mu1.upper() : mu1.truncation_level(1e-6);
  write_with(dir / "psi2.csv", [&](std::ostream& os) {
    os << "m,psi2\n";
    for (std::size_t i = 0; i < kCurveSamples; ++i) {
      const double m = lo + (hi - lo) * static_cast<double>(i) / (kCurveSamples - 1);
      os << m << ',' << psi2_star(mu1, mu2, m) << '\n';
    }
  });

  out << std::setprecision(17) << "forward bound " << rep.bound << '\n';
  return kOk;
}

json check_entry(double value, double threshold, bool pass) {
  return {{"value", value}, {"threshold", threshold}, {"pass", pass}};
}

int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  require_marginals(cfg, 1, "verify");
  const Marginal mu = load_marginal(cfg.marginals[0]);
  const Payoff g = load_payoff_or_identity(cfg);
  if (!(cfg.dt > 0.0)) throw ValidationError("--dt must be positive");
  if (cfg.paths < 2) throw ValidationError("--paths must be at least 2");
  const fs::path dir = prepare_out(cfg.out);

  SimulationConfig sc;
  sc.paths = cfg.paths;
  sc.dt = cfg.dt;
  sc.seed = cfg.seed;
  sc.bridge = !cfg.euler;

  const BoundReport rep = lookback_bound(mu, g);
  HedgeVerification hv;
  try {
    hv = hedge_verify(mu, g, sc);
  } catch (const DiagnosticError& e) {
    json d = header("verify");
    d["error"] = e.what();
    write_json(dir / "diagnostics.json", d);
    throw;
  }
  const SimulationResult& sim = hv.sim;
  const PrimalEstimate primal = primal_estimate(sim, g, sc.dt);
  const MomentCheck moment = terminal_mean(sim);

  const double n = static_cast<double>(std::max<std::size_t>(1, sim.samples.size() - sim.capped));
  const double ks_threshold = std::max(cfg.tol, 1.63 / std::sqrt(n));
  const double ks_x = ks_terminal(sim, mu);
  const double ks_m = ks_maximum(sim, mu);
  const double mean_dev = std::abs(moment.mean - mu.mean());
  const double primal_dev = std::abs(primal.mean - rep.bound);
  const double primal_allow = 3.0 * primal.std_error + primal.dt_bias;
  const double bias_allow = cfg.tol * std::max(1.0, std::abs(rep.bound));
  const bool dominance = max_dominates_terminal(sim);

  json checks;
  checks["ks_terminal"] = check_entry(ks_x, ks_threshold, ks_x < ks_threshold);
  checks["ks_maximum"] = check_entry(ks_m, ks_threshold, ks_m < ks_threshold);
  checks["terminal_mean"] =
      check_entry(mean_dev, 3.0 * moment.std_error, mean_dev <= 3.0 * moment.std_error + 1e-15);
  checks["primal"] = check_entry(primal_dev, primal_allow, primal_dev <= primal_allow);
  checks["discretization_bias"] =
      check_entry(primal.dt_bias, bias_allow, primal.dt_bias <= bias_allow);
  checks["hedge_slack"] =
      check_entry(hv.slack.fraction_below, 0.01, hv.slack.fraction_below <= 0.01);
  checks["dominance"] = {{"pass", dominance}};
  checks["capped_fraction"] = check_entry(sim.capped_fraction, sc.max_capped_fraction,
                                          sim.capped_fraction <= sc.max_capped_fraction);
  bool all_pass = true;
  for (const auto& [name, c] : checks.items()) all_pass = all_pass && c["pass"].get<bool>();

  json j = header("verify");
  j["marginal"] = describe(mu, cfg.marginals[0]);
  j["payoff"] = g.name();
  j["config"] = {{"paths", sc.paths},     {"dt", sc.dt},          {"seed", sc.seed},
                 {"bridge", sc.bridge},   {"antithetic", sc.antithetic},
                 {"t_max", sim.t_max}};
  j["bound"] = rep.bound;
  j["primal"] = {{"mean", primal.mean},
                 {"std_error", primal.std_error},
                 {"dt_bias", primal.dt_bias},
                 {"paths_used", primal.paths_used}};
  j["slack"] = {{"v0", hv.slack.v0},
                {"mean", hv.slack.mean},
                {"std_error", hv.slack.std_error},
                {"min", hv.slack.min},
                {"tolerance", hv.slack.tolerance},
                {"fraction_below", hv.slack.fraction_below}};
  j["all_pass"] = all_pass;
  j["artifacts"] = {"diagnostics.json", "samples.csv"};
  write_json(dir / "report.json", j);

  json d = header("verify");
  d["ks"] = {{"terminal", ks_x}, {"maximum", ks_m}, {"threshold", ks_threshold}};
  d["terminal_mean"] = {{"mean", moment.mean}, {"std_error", moment.std_error},
                        {"target", mu.mean()}};
  d["slack_quantiles"] = {{"min", hv.slack.min},
                          {"q01", hv.slack.q01},
                          {"q05", hv.slack.q05},
                          {"q50", hv.slack.q50},
                          {"max_abs_slope", hv.slack.max_abs_slope},
                          {"paths_used", hv.slack.paths_used}};
  d["capped"] = sim.capped;
  d["capped_fraction"] = sim.capped_fraction;
  d["checks"] = checks;
  write_json(dir / "diagnostics.json", d);

  write_with(dir / "samples.csv", [&](std::ostream& os) { write_samples_csv(os, sim); });

  out << std::setprecision(17) << "primal " << primal.mean << " +/- " << primal.std_error
      << " (bound " << rep.bound << ")\n";
  if (!all_pass) {
    for (const auto& [name, c] : checks.items()) {
      if (!c["pass"].get<bool>()) err << "check failed: " << name << '\n';
    }
    return kCheckFailed;
  }
  return kOk;
}

int cmd_dual(const RunConfig& cfg, std::ostream& out) {
  require_marginals(cfg, 1, "dual");
  const Marginal mu = load_marginal(cfg.marginals[0]);
  const Payoff g = load_payoff_or_identity(cfg);
  if (cfg.grid < 16) throw ValidationError("--grid must be at least 16");
  if (cfg.tol_set && !(cfg.tol > 0.0)) throw ValidationError("--tol must be positive");
  const fs::path dir = prepare_out(cfg.out);

  const BoundReport rep = lookback_bound(mu, g);
  const StoppingGrid grid = make_grid(mu, cfg.grid);
  const DualSolution sol = solve_u(rep.hedge, g, grid);
  const double static_leg = rep.static_leg;
  const double value = static_leg + sol.value_at_origin;

  // Same spacing, twice the span above x_lo.
  StoppingGrid wide = grid;
  wide.n = 2 * grid.n - 1;
  const double wide_value = dual_value(mu, g, rep.hedge, wide);

  DualSearchOptions opts;
  opts.warm_start = !cfg.cold_start;
  if (cfg.tol_set) opts.min_step = cfg.tol;
  const std::vector<double> knots = default_dual_knots(mu, cfg.knots);
  const DualMinimum best = minimize_dual(mu, g, knots, grid, opts);

  json j = header("dual");
  j["marginal"] = describe(mu, cfg.marginals[0]);
  j["payoff"] = g.name();
  j["bound"] = rep.bound;
  j["grid"] = {{"n", grid.n}, {"h", grid.h}, {"x_lo", grid.x_lo}, {"x_hi", grid.x_hi()},
               {"origin", grid.origin}};
  j["lambda_star"] = {{"static_leg", static_leg},
                      {"u_origin", sol.value_at_origin},
                      {"dual_value", value},
                      {"gap", value - rep.bound},
                      {"truncation_estimate", std::abs(wide_value - value)}};
  j["minimized"] = {{"start", cfg.cold_start ? "cold" : "warm"},
                    {"value", best.value},
                    {"gap", best.gap},
                    {"evaluations", best.evaluations},
                    {"stagnated", best.stagnated},
                    {"knots", knots},
                    {"weights", best.weights}};
  j["artifacts"] = {"value_surface.csv", "exercise_boundary.csv", "lambda_hat.csv",
                    "dual_trace.jsonl", "diagnostics.json"};
  write_json(dir / "report.json", j);

  json d = header("dual");
  d["sweeps"] = sol.sweeps;
  d["lambda_star_knots"] = rep.hedge.knots().size();
  d["trace_length"] = best.trace.size();
  write_json(dir / "diagnostics.json", d);

  write_with(dir / "value_surface.csv", [&](std::ostream& os) {
    os << "x,m,u\n";
    for (std::size_t jm = 0; jm < grid.n; ++jm) {
      for (std::size_t i = 0; i <= jm; ++i) {
        os << grid.x(i) << ',' << grid.x(jm) << ',' << sol.at(i, jm) << '\n';
      }
    }
  });
  write_with(dir / "exercise_boundary.csv", [&](std::ostream& os) {
    os << "m,psi\n";
    for (std::size_t jm = 0; jm < sol.boundary.size(); ++jm) {
      os << grid.x(jm) << ',' << sol.boundary[jm] << '\n';
    }
  });
  write_with(dir / "lambda_hat.csv", [&](std::ostream& os) { best.hedge.write_csv(os); });
  write_with(dir / "dual_trace.jsonl", [&](std::ostream& os) {
    for (const DualTraceEntry& t : best.trace) {
      json line = {{"schema_version", kSchemaVersion},
                   {"iteration", t.iteration},
                   {"value", t.value},
                   {"step", t.step}};
      os << line.dump() << '\n';
    }
  });

  out << std::setprecision(17) << "dual value " << value << ", minimized " << best.value
      << " (bound " << rep.bound << ")\n";
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Model-free bounds for lookback options", "motb"};
  app.require_subcommand(1, 1);
  RunConfig cfg;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--marginal", cfg.marginals, "Marginal spec file (JSON)")->required();
    sub->add_option("--payoff", cfg.payoff, "Payoff spec file (JSON); identity if omitted");
    sub->add_option("--out", cfg.out, "Output directory")->capture_default_str();
  };

  CLI::App* bound = app.add_subcommand("bound", "Lookback bound and optimal static hedge");
  add_common(bound);
  CLI::App* forward = app.add_subcommand("forward", "Forward-start lookback bound");
  add_common(forward);

  CLI::App* verify = app.add_subcommand("verify", "Monte Carlo check of the embedding and hedge");
  add_common(verify);
  verify->add_option("--seed", cfg.seed, "Base seed of the path streams")->capture_default_str();
  verify->add_option("--paths", cfg.paths, "Number of simulated paths")->capture_default_str();
  verify->add_option("--dt", cfg.dt, "Time step")->capture_default_str();
  verify->add_option("--tol", cfg.tol, "KS and bias threshold")->capture_default_str();
  verify->add_flag("--euler", cfg.euler, "Plain Euler monitoring, no bridge correction");

  CLI::App* dual = app.add_subcommand("dual", "Dual optimal-stopping solver");
  add_common(dual);
  dual->add_option("--grid", cfg.grid, "Grid points per axis")->capture_default_str();
  dual->add_option("--tol", cfg.tol, "Smallest coordinate-search step [1e-4]");
  dual->add_option("--knots", cfg.knots, "Kinks of the parameterized hedge")
      ->capture_default_str();
  dual->add_flag("--cold-start", cfg.cold_start, "Start the search from (x - ell)^+");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kInvalid;
  }
  cfg.tol_set = dual->count("--tol") > 0;
  if (verify->parsed() && !(cfg.tol > 0.0)) {
    err << "error: --tol must be positive\n";
    return kInvalid;
  }

  try {
    if (bound->parsed()) return cmd_bound(cfg, out);
    if (forward->parsed()) return cmd_forward(cfg, out);
    if (verify->parsed()) return cmd_verify(cfg, out, err);
    return cmd_dual(cfg, out);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kInvalid;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  } catch (const DiagnosticError& e) {
    err << "check failed: " << e.what() << '\n';
    return kCheckFailed;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kNumerical;
  }
}

}  // namespace motb::cli
