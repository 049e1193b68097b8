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

#include <utility>

#include "dpopt/graph_topology.hpp"
#include "dpopt/objectives.hpp"
#include "dpopt/schedules.hpp"
#include "dpopt/solvers.hpp"

namespace dpopt::testing {

// Receiver/sender pairs: ring 0→1→2→3→4→0 plus chords 0→2, 2→4, 3→1.
inline DirectedGraph five_node() {
  return {5, {{1, 0}, {2, 1}, {3, 2}, {4, 3}, {0, 4}, {2, 0}, {4, 2}, {1, 3}}};
}

inline QuadraticEstimationProblem estimation_problem(std::uint64_t seed = 2024) {
  return random_instance(seed, 5, 3, 2, 0.01, 1.0).problem;
}

inline SolverSetup alg1_setup(bool noisy = true, std::uint64_t seed = 2024) {
  SolverSetup s(Variant::kAlg1, estimation_problem(seed));
  s.consensus = build_consensus_weights(five_node(), 0.25);
  s.lambda = PowerSchedule::decaying(0.02, 0.1, 1.0);
  s.gamma = PowerSchedule::decaying(1.0, 0.1, 0.9);
  if (noisy) s.nu = PowerSchedule::growing(1.0, 0.1, 0.3);
  return s;
}

inline SolverSetup alg2_setup(bool noisy = true, std::uint64_t seed = 2024) {
  SolverSetup s(Variant::kAlg2, estimation_problem(seed));
  s.push_pull = build_push_pull_weights(five_node(), five_node(), 0.25);
  s.lambda = PowerSchedule::decaying(0.02, 0.1, 1.0);
  s.alpha = PowerSchedule::decaying(0.02, 0.1, 1.0);
  s.gamma1 = PowerSchedule::decaying(1.0, 0.1, 0.9);
  s.gamma2 = PowerSchedule::decaying(1.0, 0.1, 0.7);
  if (noisy) s.nu = PowerSchedule::growing(1.0, 0.1, 0.1);
  return s;
}

}  // namespace dpopt::testing
