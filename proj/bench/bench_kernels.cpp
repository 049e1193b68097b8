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

// Serial reference vs parallel/stacked kernels.

#include <benchmark/benchmark.h>

#include "dpopt/graph_topology.hpp"
#include "dpopt/monte_carlo.hpp"
#include "dpopt/objectives.hpp"
#include "dpopt/solvers.hpp"

namespace {

dpopt::DirectedGraph ring(int m) {
  dpopt::DirectedGraph g{m, {}};
  for (int i = 0; i < m; ++i) g.edges.emplace_back((i + 1) % m, i);
  for (int i = 0; i + 2 < m; i += 2) g.edges.emplace_back(i + 2, i);
  return g;
}

dpopt::SolverSetup setup(dpopt::Variant v, int m) {
  using dpopt::PowerSchedule;
  dpopt::SolverSetup s(v, dpopt::random_instance(2024, m, 3, 2, 0.01, 1.0).problem);
  const double w = 0.9 / m;
  if (dpopt::is_tracking(v)) {
    s.push_pull = dpopt::build_push_pull_weights(ring(m), ring(m), w);
    s.alpha = PowerSchedule::decaying(0.02, 0.1, 1.0);
    s.gamma1 = PowerSchedule::decaying(1.0, 0.1, 0.9);
    s.gamma2 = PowerSchedule::decaying(1.0, 0.1, 0.7);
    s.nu = PowerSchedule::growing(1.0, 0.1, 0.1);
  } else {
    s.consensus = dpopt::build_consensus_weights(ring(m), w);
    s.gamma = PowerSchedule::decaying(1.0, 0.1, 0.9);
    s.nu = PowerSchedule::growing(1.0, 0.1, 0.3);
  }
  s.lambda = PowerSchedule::decaying(0.02, 0.1, 1.0);
  return s;
}

void BM_MonteCarlo(benchmark::State& state, dpopt::ExecPolicy policy) {
  const auto s = setup(dpopt::Variant::kAlg1, 5);
  dpopt::RunOptions o;
  o.iterations = 1000;
  for (auto _ : state) {
    auto mc = dpopt::run_monte_carlo(s, o, static_cast<int>(state.range(0)), 7, policy);
    benchmark::DoNotOptimize(mc.traces.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK_CAPTURE(BM_MonteCarlo, serial, dpopt::ExecPolicy::kSerial)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_MonteCarlo, parallel, dpopt::ExecPolicy::kParallel)->Arg(16)->Unit(benchmark::kMillisecond);

template <bool kStacked>
void BM_Step1(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const auto s = setup(dpopt::Variant::kAlg1, m);
  dpopt::StaticConsensusState x{dpopt::initial_iterates(1, m, 2, 1.0), 0};
  const Eigen::MatrixXd zeta = dpopt::initial_iterates(2, m, 2, 0.1);
  for (auto _ : state) {
    const auto p = s.step1(x.k % 1000);
    if constexpr (kStacked) {
      dpopt::step_algorithm1(x, s.consensus->W, p, zeta, s.problem);
    } else {
      dpopt::step_algorithm1_reference(x, s.consensus->W, p, zeta, s.problem);
    }
    if (x.k > 1000) x.k = 0;
    benchmark::DoNotOptimize(x.x.data());
  }
}
BENCHMARK_TEMPLATE(BM_Step1, false)->Name("BM_Step1/reference")->Arg(5)->Arg(32);
BENCHMARK_TEMPLATE(BM_Step1, true)->Name("BM_Step1/stacked")->Arg(5)->Arg(32);

template <bool kStacked>
void BM_Step2(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const auto s = setup(dpopt::Variant::kAlg2, m);
  dpopt::RunOptions o;
  dpopt::TrackingState x = dpopt::initial_tracking_state(s, o);
  const Eigen::MatrixXd zeta = dpopt::initial_iterates(2, m, 2, 0.1);
  for (auto _ : state) {
    const auto p = s.step2(x.k % 1000);
    if constexpr (kStacked) {
      dpopt::step_algorithm2(x, *s.push_pull, p, zeta, zeta, s.problem);
    } else {
      dpopt::step_algorithm2_reference(x, *s.push_pull, p, zeta, zeta, s.problem);
    }
    if (x.k > 1000) x.k = 0;
    benchmark::DoNotOptimize(x.y.data());
  }
}
BENCHMARK_TEMPLATE(BM_Step2, false)->Name("BM_Step2/reference")->Arg(5)->Arg(32);
BENCHMARK_TEMPLATE(BM_Step2, true)->Name("BM_Step2/stacked")->Arg(5)->Arg(32);

}  // namespace

BENCHMARK_MAIN();
