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

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dpopt/dp_noise.hpp"
#include "dpopt/graph_topology.hpp"
#include "dpopt/objectives.hpp"
#include "dpopt/schedules.hpp"

namespace dpopt {

enum class Variant { kAlg1, kAlg2, kDgd, kPushPull, kPdopAlg1, kPdopPushPull };

std::string_view to_string(Variant v);
/// alg1, alg2, dgd, push_pull, pdop_alg1, pdop_push_pull.
Variant parse_variant(std::string_view name);
/// True for the gradient-tracking family (alg2, push_pull, pdop_push_pull).
bool is_tracking(Variant v);
/// True for alg1 and alg2.
bool is_reference(Variant v);

/// Iterates are m×d, one row per agent.
struct StaticConsensusState {
  Eigen::MatrixXd x;
  std::int64_t k = 0;
};

struct TrackingState {
  Eigen::MatrixXd x;
  Eigen::MatrixXd y;
  Eigen::MatrixXd g_prev;
  std::int64_t k = 0;
};

/// Schedule values at the current k.
struct Step1Params {
  double gamma = 0.0;
  double lambda = 0.0;
};

struct Step2Params {
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double alpha = 0.0;
  double lambda = 0.0;
};

/// Gradients of all agents at x, optionally ℓ1-clipped to `clip`.
void gradients(const QuadraticEstimationProblem& problem, const Eigen::MatrixXd& x,
               std::optional<double> clip, Eigen::MatrixXd& out);

/// Per-agent loop over receivers and senders, with the sender noise zeta
/// (m×d) added to every transmitted copy.
void step_algorithm1_reference(StaticConsensusState& state, const Eigen::MatrixXd& W,
                               const Step1Params& p, const Eigen::MatrixXd& zeta,
                               const QuadraticEstimationProblem& problem,
                               std::optional<double> clip = std::nullopt);
/// Stacked form (I + γW)x + γ(W − diag W)ζ − λ∇f(x).
void step_algorithm1(StaticConsensusState& state, const Eigen::MatrixXd& W,
                     const Step1Params& p, const Eigen::MatrixXd& zeta,
                     const QuadraticEstimationProblem& problem,
                     std::optional<double> clip = std::nullopt);

void step_algorithm2_reference(TrackingState& state, const PushPullWeights& w,
                               const Step2Params& p, const Eigen::MatrixXd& zeta,
                               const Eigen::MatrixXd& xi,
                               const QuadraticEstimationProblem& problem,
                               std::optional<double> clip = std::nullopt);
void step_algorithm2(TrackingState& state, const PushPullWeights& w, const Step2Params& p,
                     const Eigen::MatrixXd& zeta, const Eigen::MatrixXd& xi,
                     const QuadraticEstimationProblem& problem,
                     std::optional<double> clip = std::nullopt);

/// Fills an m×d matrix with one draw per sender for iteration k.
void draw_noise(const LaplaceNoiseSource& noise, NoiseTag tag, std::int64_t k,
                Eigen::MatrixXd& out);

/// Variant-resolved problem, weights and schedules for one experiment.
struct SolverSetup {
  SolverSetup(Variant variant, QuadraticEstimationProblem problem);

  Variant variant;
  QuadraticEstimationProblem problem;
  OptimalSolution optimum;
  std::optional<ConsensusWeights> consensus;
  std::optional<PushPullWeights> push_pull;

  PowerSchedule lambda = PowerSchedule::constant(1.0);
  PowerSchedule gamma = PowerSchedule::constant(1.0);
  PowerSchedule alpha = PowerSchedule::constant(1.0);
  PowerSchedule gamma1 = PowerSchedule::constant(1.0);
  PowerSchedule gamma2 = PowerSchedule::constant(1.0);
  std::optional<PowerSchedule> nu;  // nullopt disables the noise

  Step1Params step1(std::int64_t k) const { return {gamma(k), lambda(k)}; }
  Step2Params step2(std::int64_t k) const;
};

struct RunOptions {
  std::int64_t iterations = 10000;
  std::int64_t stride = 10;
  std::uint64_t seed = 1;
  double init_radius = 10.0;
  std::optional<double> gradient_clip;
  /// Indexed by k; copied into the trace when present.
  const std::vector<double>* epsilon_partial = nullptr;
};

struct TraceRecord {
  std::int64_t k = 0;
  double consensus_error = 0.0;
  double optimality_gap = 0.0;
  double distance_to_optimum = 0.0;
  double tracking_error = 0.0;  // NaN for static-consensus variants
  double epsilon_partial = 0.0;  // NaN when no budget series was given
};

struct Divergence {
  std::string variant;
  std::int64_t iteration = 0;
};

struct Trace {
  std::vector<TraceRecord> records;
  std::int64_t stride = 1;
  std::optional<Divergence> divergence;
};

/// Largest |entry| allowed before a run is declared divergent.
inline constexpr double kDivergenceThreshold = 1e12;

/// i.i.d. standard normal entries scaled by radius, determined by seed.
Eigen::MatrixXd initial_iterates(std::uint64_t seed, int m, int d, double radius);

StaticConsensusState initial_static_state(const SolverSetup& setup, const RunOptions& opts);
TrackingState initial_tracking_state(const SolverSetup& setup, const RunOptions& opts);

/// Metrics of one state. For tracking states x̄ is the u-weighted mean.
TraceRecord measure(const SolverSetup& setup, const StaticConsensusState& s);
TraceRecord measure(const SolverSetup& setup, const TrackingState& s);

/// Runs T iterations and records every stride-th k plus k = T. Divergence
/// stops the run and is reported in the trace, never thrown.
Trace run(const SolverSetup& setup, const RunOptions& opts);

}  // namespace dpopt
