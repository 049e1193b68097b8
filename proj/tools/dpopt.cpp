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

#include <CLI11.hpp>
#include <iostream>
#include <string>
#include <vector>

#include "dpopt/harness.hpp"

namespace {

void add_run_flags(CLI::App* cmd, dpopt::CliOptions& o, int& runs, std::int64_t& iters,
                   std::string& out) {
  cmd->add_flag("--plot", o.plot, "Write SVG plots");
  cmd->add_flag("--force", o.force, "Run even if validation fails");
  cmd->add_option("--runs", runs, "Monte Carlo runs (overrides run.monte_carlo)");
  cmd->add_option("--iters", iters, "Iterations T (overrides run.iterations)");
  cmd->add_option("--out", out, "Output directory (overrides run.output)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differentially private distributed optimization harness"};
  app.require_subcommand(1);

  std::string config;
  dpopt::CliOptions opts;
  int runs = -1;
  std::int64_t iters = -1;
  std::string out;
  std::vector<double> horizons;
  std::vector<std::string> variants;

  auto* validate = app.add_subcommand("validate", "Check every graph and schedule condition");
  validate->add_option("config", config, "Experiment config")->required();

  auto* run = app.add_subcommand("run", "Run seeded Monte Carlo experiments");
  run->add_option("config", config, "Experiment config")->required();
  add_run_flags(run, opts, runs, iters, out);

  auto* budget = app.add_subcommand("budget", "Evaluate the cumulative privacy budget");
  budget->add_option("config", config, "Experiment config")->required();
  budget->add_option("--horizons", horizons, "Comma-separated horizons, e.g. 1e3,1e4")
      ->delimiter(',')
      ->required();
  budget->add_option("--out", out, "Output directory (overrides run.output)");

  auto* compare = app.add_subcommand("compare", "Run several variants on shared seeds");
  compare->add_option("config", config, "Experiment config")->required();
  compare->add_option("--variants", variants, "Comma-separated variants")
      ->delimiter(',')
      ->required();
  add_run_flags(compare, opts, runs, iters, out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (runs != -1) opts.runs = runs;
  if (iters >= 0) opts.iterations = iters;
  if (!out.empty()) opts.output_dir = out;

  if (*validate) return dpopt::cli_validate(config, std::cout, std::cerr);
  if (*run) return dpopt::cli_run(config, opts, std::cout, std::cerr);
  if (*budget) return dpopt::cli_budget(config, horizons, opts, std::cout, std::cerr);

  std::vector<dpopt::Variant> parsed;
  try {
    for (const auto& v : variants) parsed.push_back(dpopt::parse_variant(v));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return dpopt::cli_compare(config, parsed, opts, std::cout, std::cerr);
}
