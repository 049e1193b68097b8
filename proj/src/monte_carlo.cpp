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

#include "dpopt/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <stdexcept>

namespace dpopt {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Moments {
  double mean;
  double var;
};

Moments moments(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  double sum = 0.0;
  for (double x : v) sum += x;
  const double mean = sum / n;
  if (v.size() < 2) return {mean, 0.0};
  if (!std::isfinite(mean)) return {mean, std::isnan(mean) ? mean : kInf};
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, ss / (n - 1.0)};
}

}  // namespace

MonteCarloResult run_monte_carlo(const SolverSetup& setup, const RunOptions& opts, int runs,
                                 std::uint64_t base_seed, ExecPolicy policy) {
  if (runs < 1) throw std::invalid_argument("runs must be >= 1");
  MonteCarloResult out;
  out.seeds.resize(static_cast<std::size_t>(runs));
  out.traces.resize(static_cast<std::size_t>(runs));
  for (int i = 0; i < runs; ++i) out.seeds[i] = derive_seed(base_seed, static_cast<std::uint64_t>(i));

  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(runs));
  auto one = [&](int i) {
    try {
      RunOptions o = opts;
      o.seed = out.seeds[i];
      out.traces[i] = run(setup, o);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  if (policy == ExecPolicy::kParallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (int i = 0; i < runs; ++i) one(i);
  } else {
    for (int i = 0; i < runs; ++i) one(i);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

AggregateResult aggregate(const std::vector<Trace>& traces, std::int64_t horizon) {
  if (traces.empty()) throw std::invalid_argument("aggregate needs at least one trace");
  AggregateResult out;
  out.runs = static_cast<int>(traces.size());

  const Trace* longest = &traces.front();
  for (const auto& t : traces) {
    if (t.records.size() > longest->records.size()) longest = &t;
    if (t.divergence) ++out.diverged;
  }

  std::vector<std::int64_t> grid;
  if (horizon >= 0) {
    const std::int64_t stride = std::max<std::int64_t>(longest->stride, 1);
    for (std::int64_t k = 0; k < horizon; k += stride) grid.push_back(k);
    grid.push_back(horizon);
  } else {
    for (const auto& r : longest->records) grid.push_back(r.k);
  }
  const bool tracking =
      !longest->records.empty() && !std::isnan(longest->records.front().tracking_error);

  const std::size_t n = traces.size();
  std::vector<double> gap(n), cons(n), track(n);
  for (std::size_t r = 0; r < grid.size(); ++r) {
    double eps = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < n; ++i) {
      const auto& rec = traces[i].records;
      if (r < rec.size() && rec[r].k == grid[r]) {
        gap[i] = rec[r].optimality_gap;
        cons[i] = rec[r].consensus_error;
        track[i] = rec[r].tracking_error;
        eps = rec[r].epsilon_partial;
      } else {
        gap[i] = cons[i] = kInf;
        track[i] = tracking ? kInf : std::numeric_limits<double>::quiet_NaN();
      }
    }
    AggregateRow row;
    row.k = grid[r];
    const Moments g = moments(gap), c = moments(cons), t = moments(track);
    row.mean_gap = g.mean;
    row.var_gap = g.var;
    row.mean_consensus = c.mean;
    row.var_consensus = c.var;
    row.mean_tracking = t.mean;
    row.var_tracking = t.var;
    row.epsilon_partial = eps;
    out.rows.push_back(row);
  }

  for (const auto& t : traces) {
    const bool full = !t.divergence && !t.records.empty() && t.records.back().k == grid.back();
    out.final_gaps.push_back(full ? t.records.back().optimality_gap : kInf);
  }
  return out;
}

MeanSe mean_and_se(const std::vector<double>& values) {
  if (values.empty()) throw std::invalid_argument("mean_and_se needs values");
  const Moments m = moments(values);
  return {m.mean, std::sqrt(m.var / static_cast<double>(values.size()))};
}

}  // namespace dpopt
