// Copyright 2026 The dpopt Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dpopt/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>

#include "dpopt/csv.hpp"
#include "dpopt/dp_noise.hpp"
#include "dpopt/errors.hpp"
#include "dpopt/svg_plot.hpp"

namespace dpopt {
namespace {

namespace fs = std::filesystem;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const PowerSchedule& need(const std::optional<PowerSchedule>& s, const char* key, Variant v) {
  if (!s) {
    throw ConfigError("variant " + std::string(to_string(v)) + " needs " + key +
                      " in the config");
  }
  return *s;
}

Variant reference_of(Variant v) { return is_tracking(v) ? Variant::kAlg2 : Variant::kAlg1; }

bool is_pdop(Variant v) { return v == Variant::kPdopAlg1 || v == Variant::kPdopPushPull; }

// Setup without the PDOP ν scale (filled by the caller).
SolverSetup base_setup(const ExperimentConfig& cfg, Variant v) {
  SolverSetup s(v, make_problem(cfg));
  if (is_tracking(v)) {
    s.push_pull = build_push_pull_weights(cfg.graph_R, cfg.graph_C, cfg.edge_weight);
  } else {
    s.consensus = build_consensus_weights(cfg.graph, cfg.edge_weight);
  }
  const PowerSchedule one = PowerSchedule::constant(1.0);
  const PowerSchedule pdop_lambda = PowerSchedule::geometric(cfg.pdop_lambda_a, cfg.pdop_lambda_r);
  switch (v) {
    case Variant::kAlg1:
      s.lambda = need(cfg.lambda, "schedules.lambda", v);
      s.gamma = need(cfg.gamma, "schedules.gamma", v);
      break;
    case Variant::kDgd:
      s.lambda = need(cfg.lambda, "schedules.lambda", v);
      s.gamma = one;
      break;
    case Variant::kPdopAlg1:
      s.lambda = pdop_lambda;
      s.gamma = one;
      break;
    case Variant::kAlg2:
      s.lambda = need(cfg.lambda, "schedules.lambda", v);
      s.alpha = need(cfg.alpha, "schedules.alpha", v);
      s.gamma1 = need(cfg.gamma1, "schedules.gamma1", v);
      s.gamma2 = need(cfg.gamma2, "schedules.gamma2", v);
      break;
    case Variant::kPushPull:
      s.lambda = need(cfg.lambda, "schedules.lambda", v);
      s.alpha = PowerSchedule::zero();
      s.gamma1 = one;
      s.gamma2 = one;
      break;
    case Variant::kPdopPushPull:
      s.lambda = pdop_lambda;
      s.alpha = PowerSchedule::zero();
      s.gamma1 = one;
      s.gamma2 = one;
      break;
  }
  if (cfg.noise_enabled) {
    const PowerSchedule& nu = need(cfg.nu, "noise.nu", v);
    s.nu = is_pdop(v) ? PowerSchedule::geometric(1.0, cfg.pdop_nu_r) : nu;
  }
  return s;
}

ConfigError bad_override(const std::string& what) { return ConfigError(what); }

ExperimentConfig with_overrides(ExperimentConfig cfg, const CliOptions& o) {
  if (o.runs) {
    if (*o.runs < 1) throw bad_override("--runs must be >= 1");
    cfg.runs = *o.runs;
  }
  if (o.iterations) {
    if (*o.iterations < 0) throw bad_override("--iters must be >= 0");
    cfg.iterations = *o.iterations;
  }
  if (o.output_dir) cfg.output_dir = *o.output_dir;
  return cfg;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

PlotSeries band_series(const std::string& name, const AggregateResult& agg, bool gap) {
  PlotSeries s;
  s.name = name;
  for (const auto& r : agg.rows) {
    const double mean = gap ? r.mean_gap : r.mean_consensus;
    const double sd = std::sqrt(gap ? r.var_gap : r.var_consensus);
    s.x.push_back(static_cast<double>(r.k));
    s.y.push_back(mean);
    s.lo.push_back(mean - sd);
    s.hi.push_back(mean + sd);
  }
  return s;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
}

}  // namespace

QuadraticEstimationProblem make_problem(const ExperimentConfig& cfg) {
  if (!cfg.problem_csv.empty()) return read_problem_csv(cfg.problem_csv, cfg.sigma_reg);
  return random_instance(cfg.problem_seed, cfg.m, cfg.s, cfg.d, cfg.sigma_reg, cfg.noise_std)
      .problem;
}

ConditionReport validate_experiment(const ExperimentConfig& cfg, Variant v) {
  ConditionReport r;
  try {
    const auto problem = make_problem(cfg);
    optimal_solution(problem);
    r.add("problem has a unique optimum", "normal equations", 0.0, problem.m() == cfg.m,
          problem.m() == cfg.m ? "" : "problem CSV agent count differs from problem.m");
  } catch (const DegeneracyError& e) {
    r.add("problem has a unique optimum", "normal equations", 0.0, false, e.what());
  }

  if (is_tracking(v)) {
    r.merge(validate_assumption4(cfg.graph_R, cfg.graph_C), "graph: ");
    try {
      const auto w = build_push_pull_weights(cfg.graph_R, cfg.graph_C, cfg.edge_weight);
      const double res_u = (w.u.transpose() * w.R).cwiseAbs().maxCoeff();
      const double res_v = (w.C * w.v).cwiseAbs().maxCoeff();
      r.add("graph: uᵀR = 0", "max |uᵀR| < 1e-10", res_u, res_u < 1e-10);
      r.add("graph: Cv = 0", "max |Cv| < 1e-10", res_v, res_v < 1e-10);
      r.add("graph: uᵀv > 0", "inner product", w.u.dot(w.v), w.u.dot(w.v) > 0.0);
    } catch (const ConnectivityError&) {
      // Already reported by the spanning-tree entries.
    } catch (const Error& e) {
      r.add("graph: push-pull weights", "construction", 0.0, false, e.what());
    }
  } else {
    try {
      const auto w = build_consensus_weights(cfg.graph, cfg.edge_weight);
      r.merge(validate_assumption2(w.W), "graph: ");
    } catch (const ConnectivityError& e) {
      r.add("graph: connected", "reachability", 0.0, false, e.what());
    } catch (const SpectralError& e) {
      r.add("graph: ‖I+W−𝟏𝟏ᵀ/m‖ < 1", "2-norm", 1.0, false, e.what());
    }
  }

  if (cfg.noise_enabled) need(cfg.nu, "noise.nu", v);
  switch (v) {
    case Variant::kAlg1:
      r.merge(validate_theorem1({need(cfg.lambda, "schedules.lambda", v),
                                 need(cfg.gamma, "schedules.gamma", v),
                                 need(cfg.nu, "noise.nu", v)}));
      break;
    case Variant::kAlg2:
      r.merge(validate_theorem3({need(cfg.lambda, "schedules.lambda", v),
                                 need(cfg.alpha, "schedules.alpha", v),
                                 need(cfg.gamma1, "schedules.gamma1", v),
                                 need(cfg.gamma2, "schedules.gamma2", v),
                                 need(cfg.nu, "noise.nu", v)}));
      break;
    default: {
      // Baselines only need schedules that evaluate to finite values.
      const SolverSetup s = base_setup(cfg, v);
      bool finite = true;
      for (std::int64_t k : {std::int64_t{0}, cfg.iterations}) {
        const double vals[] = {s.lambda(k), s.gamma(k), s.alpha(k), s.gamma1(k), s.gamma2(k),
                               s.nu ? (*s.nu)(k) : 0.0};
        for (double x : vals) finite = finite && std::isfinite(x);
      }
      r.add("baseline schedules finite", "evaluation at k = 0 and T", 0.0, finite);
      break;
    }
  }
  return r;
}

std::optional<PrivacyLedger> make_ledger(const SolverSetup& s, double C, Envelope envelope,
                                         std::int64_t T) {
  if (!s.nu) return std::nullopt;
  if (is_tracking(s.variant)) {
    const auto& w = *s.push_pull;
    return build_ledger_alg2({s.lambda, s.alpha, s.gamma1, s.gamma2, *s.nu}, w.min_diag_R,
                             w.min_diag_C, C, T, envelope);
  }
  return build_ledger_alg1({s.lambda, s.gamma, *s.nu}, s.consensus->min_diag_mag, C, T,
                           envelope);
}

double matched_pdop_scale(const ExperimentConfig& cfg, Variant pdop_variant) {
  if (!is_pdop(pdop_variant)) throw std::invalid_argument("not a PDOP variant");
  const SolverSetup ref = base_setup(cfg, reference_of(pdop_variant));
  const SolverSetup pdop = base_setup(cfg, pdop_variant);  // ν scale 1
  const std::int64_t T = std::max<std::int64_t>(cfg.iterations, 1);
  const auto lr = make_ledger(ref, 1.0, cfg.envelope, T);
  const auto lp = make_ledger(pdop, 1.0, cfg.envelope, T);
  if (!lr || !lp) throw ConfigError("budget matching needs noise.nu");
  return lp->epsilon(T) / lr->epsilon(T);
}

SolverSetup make_setup(const ExperimentConfig& cfg, Variant v) {
  SolverSetup s = base_setup(cfg, v);
  if (is_pdop(v) && s.nu) {
    const double c = cfg.pdop_nu_a ? *cfg.pdop_nu_a : matched_pdop_scale(cfg, v);
    s.nu = PowerSchedule::geometric(c, cfg.pdop_nu_r);
  }
  return s;
}

double resolve_gradient_bound(const ExperimentConfig& cfg, const SolverSetup& setup) {
  if (cfg.gradient_bound) return *cfg.gradient_bound;
  const AdjacentVariant adj(setup.problem, cfg.adjacent_agent, cfg.adjacent_delta,
                            cfg.adjacent_eta);
  RunOptions o;
  o.iterations = cfg.iterations;
  o.seed = derive_seed(cfg.noise_seed, 0);
  o.init_radius = cfg.init_radius;
  return coupled_difference_trace(setup, adj, o, DifferenceMode::kHarvest).harvested_C;
}

ExperimentRun run_experiment(const ExperimentConfig& cfg, Variant v, ExecPolicy policy) {
  ExperimentRun run(make_setup(cfg, v));
  if (run.setup.nu) {
    try {
      run.C = resolve_gradient_bound(cfg, run.setup);
      run.ledger = make_ledger(run.setup, run.C, cfg.envelope, cfg.iterations);
    } catch (const RangeError& e) {
      run.warnings.push_back(std::string("no privacy budget: ") + e.what());
    }
  }
  RunOptions o;
  o.iterations = cfg.iterations;
  o.stride = cfg.stride;
  o.init_radius = cfg.init_radius;
  o.gradient_clip = cfg.gradient_clip;
  o.epsilon_partial = run.ledger ? &run.ledger->epsilon_partial : nullptr;
  run.mc = run_monte_carlo(run.setup, o, cfg.runs, cfg.noise_seed, policy);
  run.agg = aggregate(run.mc.traces, o.iterations);
  if (run.ledger) {
    for (auto& row : run.agg.rows) row.epsilon_partial = run.ledger->epsilon(row.k);
  }
  return run;
}

void write_run_outputs(const ExperimentRun& run, const std::string& dir, bool plot) {
  ensure_dir(dir);
  const std::string v(to_string(run.setup.variant));
  const fs::path base(dir);
  CsvWriter failures((base / ("failures_" + v + ".csv")).string(),
                     {"run", "seed", "variant", "iteration"});
  for (std::size_t i = 0; i < run.mc.traces.size(); ++i) {
    const auto& t = run.mc.traces[i];
    const std::string idx = std::to_string(i + 1);
    if (t.divergence) {
      failures.row({idx, std::to_string(run.mc.seeds[i]), t.divergence->variant,
                    std::to_string(t.divergence->iteration)});
      write_trace_csv((base / ("diverged_" + v + "_run" + idx + ".csv")).string(), t);
    } else {
      write_trace_csv((base / ("trace_" + v + "_run" + idx + ".csv")).string(), t);
    }
  }
  failures.close();
  write_aggregate_csv((base / ("aggregate_" + v + ".csv")).string(), run.agg);
  if (run.ledger) write_budget_csv((base / ("budget_" + v + ".csv")).string(), *run.ledger);
  if (plot) {
    PlotSpec gap{v + ": optimality gap (mean ± 1 sd)", "k", "F(x̄) − F*", true,
                 {band_series(v, run.agg, true)}};
    write_svg((base / (v + "_gap.svg")).string(), gap);
    PlotSpec cons{v + ": consensus error (mean ± 1 sd)", "k", "Σ‖x_i − x̄‖²", true,
                  {band_series(v, run.agg, false)}};
    write_svg((base / (v + "_consensus.svg")).string(), cons);
  }
}

RateFit rate_fit(const Trace& trace, Metric metric, const PowerSchedule& lambda,
                 const PowerSchedule& gamma, std::int64_t k_lo, std::int64_t k_hi) {
  if (k_lo < 1 || k_hi < 100 * k_lo) {
    throw RangeError("rate_fit window must span at least two decades with k_lo >= 1");
  }
  std::vector<double> xs, ys;
  for (const auto& r : trace.records) {
    if (r.k < k_lo || r.k > k_hi) continue;
    double y = 0.0;
    switch (metric) {
      case Metric::kConsensus: y = r.consensus_error; break;
      case Metric::kGap: y = r.optimality_gap; break;
      case Metric::kDistance: y = r.distance_to_optimum; break;
      case Metric::kTracking: y = r.tracking_error; break;
    }
    if (!(y > 0.0) || !std::isfinite(y)) {
      throw RangeError("rate_fit needs positive finite metric values (k = " +
                       std::to_string(r.k) + ")");
    }
    xs.push_back(std::log(lambda(r.k) / gamma(r.k)));
    ys.push_back(std::log(y));
  }
  if (xs.size() < 3) throw RangeError("rate_fit window holds fewer than 3 records");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx <= 0.0) throw RangeError("log(λ/γ) is constant over the window");
  RateFit fit;
  fit.points = xs.size();
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  // A flat metric leaves only rounding in syy.
  const double flat = 1e-24 * n * std::max(1.0, my * my);
  if (syy <= flat) {
    fit.slope = 0.0;
    fit.intercept = my;
    fit.r2 = 1.0;
  } else {
    fit.r2 = (sxy * sxy) / (sxx * syy);
  }
  return fit;
}

int cli_validate(const std::string& path, std::ostream& out, std::ostream& err) {
  try {
    const ExperimentConfig cfg = load_experiment(path);
    const ConditionReport r = validate_experiment(cfg, cfg.variant);
    out << "variant: " << to_string(cfg.variant) << "\n" << r.to_table();
    return r.overall() ? 0 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

int cli_run(const std::string& path, const CliOptions& opts, std::ostream& out,
            std::ostream& err) {
  try {
    const ExperimentConfig cfg = with_overrides(load_experiment(path), opts);
    const ConditionReport r = validate_experiment(cfg, cfg.variant);
    if (!r.overall()) {
      out << r.to_table();
      if (!opts.force) {
        err << "validation failed; use --force to run anyway\n";
        return 1;
      }
      err << "warning: running despite failed conditions (--force)\n";
    }
    const ExperimentRun run = run_experiment(cfg, cfg.variant);
    write_run_outputs(run, cfg.output_dir, opts.plot);
    for (const auto& w : run.warnings) err << "warning: " << w << "\n";
    const auto& last = run.agg.rows.back();
    out << "variant " << to_string(cfg.variant) << ": runs " << run.agg.runs << ", diverged "
        << run.agg.diverged << ", k " << last.k << ", mean gap " << fmt(last.mean_gap)
        << ", mean consensus " << fmt(last.mean_consensus);
    if (run.ledger) out << ", epsilon " << fmt(run.ledger->epsilon(cfg.iterations));
    out << "\noutputs in " << cfg.output_dir << "\n";
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

int cli_budget(const std::string& path, const std::vector<double>& horizons,
               const CliOptions& opts, std::ostream& out, std::ostream& err) {
  try {
    const ExperimentConfig cfg = with_overrides(load_experiment(path), opts);
    if (horizons.empty()) throw ConfigError("--horizons needs at least one value");
    std::vector<std::int64_t> Ts;
    for (double h : horizons) {
      if (!(h >= 1.0) || h != std::floor(h) || h > 1e8) {
        throw ConfigError("horizon " + fmt(h) + " must be an integer in [1, 1e8]");
      }
      Ts.push_back(static_cast<std::int64_t>(h));
    }
    if (!cfg.noise_enabled) throw ConfigError("budget needs noise.enabled = true");
    const std::int64_t T_max = *std::max_element(Ts.begin(), Ts.end());
    const SolverSetup setup = make_setup(cfg, cfg.variant);
    const double C = resolve_gradient_bound(cfg, setup);
    const auto ledger = make_ledger(setup, C, cfg.envelope, T_max);
    const std::string v(to_string(cfg.variant));

    ensure_dir(cfg.output_dir);
    const fs::path base(cfg.output_dir);
    write_budget_csv((base / ("budget_" + v + ".csv")).string(), *ledger);
    CsvWriter summary((base / ("budget_summary_" + v + ".csv")).string(),
                      {"T", "epsilon", "tail_status", "tail_bound"});
    out << "variant " << v << ", envelope " << to_string(cfg.envelope) << ", C " << fmt(C)
        << ", Σλ/ν " << to_string(ledger->lambda_over_nu.kind) << "\n";
    for (std::int64_t T : Ts) {
      TailEstimate tail;
      if (T >= 2) tail = budget_tail_estimate(*ledger, T);
      const double eps = ledger->epsilon(T);
      summary.row({std::to_string(T), format_number(eps), std::string(to_string(tail.status)),
                   format_number(tail.bound)});
      out << "T " << T << ": epsilon " << fmt(eps) << ", tail " << to_string(tail.status);
      if (tail.status == TailStatus::kFinite) out << " <= " << fmt(tail.bound);
      if (tail.status == TailStatus::kInfinite) out << " (infinite budget)";
      out << "\n";
    }
    summary.close();
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

int cli_compare(const std::string& path, const std::vector<Variant>& variants,
                const CliOptions& opts, std::ostream& out, std::ostream& err) {
  try {
    const ExperimentConfig cfg = with_overrides(load_experiment(path), opts);
    if (variants.empty()) throw ConfigError("--variants needs at least one variant");
    bool valid = true;
    for (Variant v : variants) {
      const ConditionReport r = validate_experiment(cfg, v);
      if (!r.overall()) {
        out << "variant " << to_string(v) << ":\n" << r.to_table();
        valid = false;
      }
    }
    if (!valid && !opts.force) {
      err << "validation failed; use --force to run anyway\n";
      return 1;
    }
    ensure_dir(cfg.output_dir);
    const fs::path base(cfg.output_dir);
    CsvWriter summary((base / "compare_summary.csv").string(),
                      {"variant", "runs", "diverged", "mean_final_gap", "se_final_gap",
                       "epsilon_T"});
    PlotSpec plot{"optimality gap (mean ± 1 sd)", "k", "F(x̄) − F*", true, {}};
    for (Variant v : variants) {
      const ExperimentRun run = run_experiment(cfg, v);
      write_run_outputs(run, cfg.output_dir, false);
      for (const auto& w : run.warnings) err << "warning: " << w << "\n";
      const MeanSe ms = mean_and_se(run.agg.final_gaps);
      const double eps = run.ledger ? run.ledger->epsilon(cfg.iterations) : kNaN;
      summary.row({std::string(to_string(v)), std::to_string(run.agg.runs),
                   std::to_string(run.agg.diverged), format_number(ms.mean),
                   format_number(ms.se), format_number(eps)});
      out << to_string(v) << ": mean final gap " << fmt(ms.mean) << " ± " << fmt(ms.se)
          << " (se), diverged " << run.agg.diverged << "/" << run.agg.runs;
      if (run.ledger) out << ", epsilon " << fmt(eps);
      out << "\n";
      plot.series.push_back(band_series(std::string(to_string(v)), run.agg, true));
    }
    summary.close();
    if (opts.plot) write_svg((base / "compare_gap.svg").string(), plot);
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace dpopt
