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

#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "dpopt/condition_report.hpp"
#include "dpopt/config.hpp"
#include "dpopt/monte_carlo.hpp"
#include "dpopt/privacy_accountant.hpp"
#include "dpopt/solvers.hpp"

namespace dpopt {

QuadraticEstimationProblem make_problem(const ExperimentConfig& cfg);

/// Problem, graph and schedule conditions for one variant. Baselines only
/// need well-formed graphs and finite schedules.
ConditionReport validate_experiment(const ExperimentConfig& cfg, Variant variant);

/// Weights and variant-resolved schedules. PDOP variants get geometric λ
/// and ν; ν's scale is matched to the reference budget unless configured.
SolverSetup make_setup(const ExperimentConfig& cfg, Variant variant);

/// Budget ledger of the setup's schedules over [1, T]; nullopt without noise.
std::optional<PrivacyLedger> make_ledger(const SolverSetup& setup, double C,
                                         Envelope envelope, std::int64_t T);

/// Configured C, or the harvested bound of a coupled run on the first seed.
double resolve_gradient_bound(const ExperimentConfig& cfg, const SolverSetup& setup);

/// ν scale c for a PDOP variant so that its ε_T equals the reference's.
double matched_pdop_scale(const ExperimentConfig& cfg, Variant pdop_variant);

struct ExperimentRun {
  ExperimentRun(SolverSetup s) : setup(std::move(s)) {}

  SolverSetup setup;
  MonteCarloResult mc;
  AggregateResult agg;
  std::optional<PrivacyLedger> ledger;
  double C = 0.0;
  std::vector<std::string> warnings;
};

/// cfg.runs seeded runs of cfg.iterations steps; run seeds derive from
/// cfg.noise_seed, so variants of one config share their noise.
ExperimentRun run_experiment(const ExperimentConfig& cfg, Variant variant,
                             ExecPolicy policy = ExecPolicy::kParallel);

/// trace_<v>_run<i>.csv (or diverged_<v>_run<i>.csv), failures_<v>.csv,
/// aggregate_<v>.csv, budget_<v>.csv and, with plot, <v>_gap.svg and
/// <v>_consensus.svg. Run indices start at 1.
void write_run_outputs(const ExperimentRun& run, const std::string& dir, bool plot);

enum class Metric { kConsensus, kGap, kDistance, kTracking };

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::size_t points = 0;
};

/// Least-squares slope of log(metric) against log(λ^k/γ^k) over the records
/// with k in [k_lo, k_hi]. RangeError if the window spans under two decades,
/// holds fewer than 3 records, or meets a non-positive metric value.
RateFit rate_fit(const Trace& trace, Metric metric, const PowerSchedule& lambda,
                 const PowerSchedule& gamma, std::int64_t k_lo, std::int64_t k_hi);

struct CliOptions {
  bool plot = false;
  bool force = false;
  std::optional<int> runs;
  std::optional<std::int64_t> iterations;
  std::optional<std::string> output_dir;
};

/// Exit codes: 0 success, 1 validation failure, 2 runtime or I/O failure.
int cli_validate(const std::string& path, std::ostream& out, std::ostream& err);
int cli_run(const std::string& path, const CliOptions& opts, std::ostream& out,
            std::ostream& err);
int cli_budget(const std::string& path, const std::vector<double>& horizons,
               const CliOptions& opts, std::ostream& out, std::ostream& err);
int cli_compare(const std::string& path, const std::vector<Variant>& variants,
                const CliOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace dpopt
