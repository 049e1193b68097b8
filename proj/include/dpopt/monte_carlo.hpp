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
#include <vector>

#include "dpopt/solvers.hpp"

namespace dpopt {

enum class ExecPolicy { kSerial, kParallel };

struct MonteCarloResult {
  std::vector<std::uint64_t> seeds;
  std::vector<Trace> traces;  // ordered by run index
};

/// Run i uses seed derive_seed(base_seed, i). The parallel policy spreads
/// runs over OpenMP threads; results are identical to the serial policy.
MonteCarloResult run_monte_carlo(const SolverSetup& setup, const RunOptions& opts, int runs,
                                 std::uint64_t base_seed,
                                 ExecPolicy policy = ExecPolicy::kParallel);

struct AggregateRow {
  std::int64_t k = 0;
  double mean_gap = 0.0;
  double var_gap = 0.0;
  double mean_consensus = 0.0;
  double var_consensus = 0.0;
  double mean_tracking = 0.0;
  double var_tracking = 0.0;
  double epsilon_partial = 0.0;
};

struct AggregateResult {
  std::vector<AggregateRow> rows;
  std::vector<double> final_gaps;  // +inf for diverged runs
  int runs = 0;
  int diverged = 0;
};

/// Mean and sample variance (n − 1; 0 for a single run) per recorded k.
/// A diverged run counts as +inf from its divergence onward. With a
/// horizon, rows cover every stride-th k up to it plus k = horizon even if
/// all runs stopped early; otherwise they follow the longest trace.
AggregateResult aggregate(const std::vector<Trace>& traces, std::int64_t horizon = -1);

/// Sample mean and standard error of the mean.
struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};
MeanSe mean_and_se(const std::vector<double>& values);

}  // namespace dpopt
