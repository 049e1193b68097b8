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

#include "dpopt/solvers.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "dpopt/errors.hpp"

namespace dpopt {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool diverged(const Eigen::MatrixXd& a) {
  // NaN fails the comparison, so it counts as divergence too.
  return !(a.cwiseAbs().maxCoeff() <= kDivergenceThreshold);
}

Eigen::RowVectorXd row(const Eigen::MatrixXd& a, int i) { return a.row(i); }

}  // namespace

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::kAlg1: return "alg1";
    case Variant::kAlg2: return "alg2";
    case Variant::kDgd: return "dgd";
    case Variant::kPushPull: return "push_pull";
    case Variant::kPdopAlg1: return "pdop_alg1";
    case Variant::kPdopPushPull: return "pdop_push_pull";
  }
  return "?";
}

Variant parse_variant(std::string_view name) {
  for (Variant v : {Variant::kAlg1, Variant::kAlg2, Variant::kDgd, Variant::kPushPull,
                    Variant::kPdopAlg1, Variant::kPdopPushPull}) {
    if (to_string(v) == name) return v;
  }
  throw std::invalid_argument("unknown variant '" + std::string(name) + "'");
}

bool is_tracking(Variant v) {
  return v == Variant::kAlg2 || v == Variant::kPushPull || v == Variant::kPdopPushPull;
}

bool is_reference(Variant v) { return v == Variant::kAlg1 || v == Variant::kAlg2; }

void gradients(const QuadraticEstimationProblem& problem, const Eigen::MatrixXd& x,
               std::optional<double> clip, Eigen::MatrixXd& out) {
  const int m = problem.m();
  const int d = problem.d();
  out.resize(m, d);
  Eigen::VectorXd theta(d), g(d);
  for (int i = 0; i < m; ++i) {
    theta = x.row(i).transpose();
    problem.local_gradient_into(i, theta.data(), g.data());
    if (clip) {
      const double n1 = g.lpNorm<1>();
      if (n1 > *clip) g *= *clip / n1;
    }
    out.row(i) = g.transpose();
  }
}

void step_algorithm1_reference(StaticConsensusState& state, const Eigen::MatrixXd& W,
                               const Step1Params& p, const Eigen::MatrixXd& zeta,
                               const QuadraticEstimationProblem& problem,
                               std::optional<double> clip) {
  const int m = static_cast<int>(state.x.rows());
  Eigen::MatrixXd g;
  gradients(problem, state.x, clip, g);
  Eigen::MatrixXd next(state.x.rows(), state.x.cols());
  for (int i = 0; i < m; ++i) {
    Eigen::RowVectorXd xi = row(state.x, i) - p.lambda * row(g, i);
    for (int j = 0; j < m; ++j) {
      if (j == i || W(i, j) == 0.0) continue;
      xi += p.gamma * W(i, j) * (row(state.x, j) + row(zeta, j) - row(state.x, i));
    }
    next.row(i) = xi;
  }
  state.x = std::move(next);
  ++state.k;
  if (diverged(state.x)) throw DivergenceError("alg1", state.k);
}

void step_algorithm1(StaticConsensusState& state, const Eigen::MatrixXd& W,
                     const Step1Params& p, const Eigen::MatrixXd& zeta,
                     const QuadraticEstimationProblem& problem, std::optional<double> clip) {
  Eigen::MatrixXd g;
  gradients(problem, state.x, clip, g);
  Eigen::MatrixXd mix = W * (state.x + zeta);
  mix -= W.diagonal().asDiagonal() * zeta;
  state.x += p.gamma * mix - p.lambda * g;
  ++state.k;
  if (diverged(state.x)) throw DivergenceError("alg1", state.k);
}

void step_algorithm2_reference(TrackingState& state, const PushPullWeights& w,
                               const Step2Params& p, const Eigen::MatrixXd& zeta,
                               const Eigen::MatrixXd& xi,
                               const QuadraticEstimationProblem& problem,
                               std::optional<double> clip) {
  const int m = static_cast<int>(state.x.rows());
  const auto& R = w.R;
  const auto& C = w.C;
  Eigen::MatrixXd x_next(state.x.rows(), state.x.cols());
  for (int i = 0; i < m; ++i) {
    Eigen::RowVectorXd v = (1.0 + p.gamma1 * R(i, i)) * row(state.x, i) -
                           p.lambda * row(state.y, i);
    for (int j = 0; j < m; ++j) {
      if (j == i || R(i, j) == 0.0) continue;
      v += p.gamma1 * R(i, j) * (row(state.x, j) + row(zeta, j));
    }
    x_next.row(i) = v;
  }
  Eigen::MatrixXd g_next;
  gradients(problem, x_next, clip, g_next);
  Eigen::MatrixXd y_next(state.y.rows(), state.y.cols());
  for (int i = 0; i < m; ++i) {
    Eigen::RowVectorXd v = (1.0 - p.alpha + p.gamma2 * C(i, i)) * row(state.y, i) +
                           row(g_next, i) - (1.0 - p.alpha) * row(state.g_prev, i);
    for (int j = 0; j < m; ++j) {
      if (j == i || C(i, j) == 0.0) continue;
      v += p.gamma2 * C(i, j) * (row(state.y, j) + row(xi, j));
    }
    y_next.row(i) = v;
  }
  state.x = std::move(x_next);
  state.y = std::move(y_next);
  state.g_prev = std::move(g_next);
  ++state.k;
  if (diverged(state.x) || diverged(state.y)) throw DivergenceError("alg2", state.k);
}

void step_algorithm2(TrackingState& state, const PushPullWeights& w, const Step2Params& p,
                     const Eigen::MatrixXd& zeta, const Eigen::MatrixXd& xi,
                     const QuadraticEstimationProblem& problem, std::optional<double> clip) {
  Eigen::MatrixXd mix = w.R * (state.x + zeta);
  mix -= w.R.diagonal().asDiagonal() * zeta;
  state.x += p.gamma1 * mix - p.lambda * state.y;

  Eigen::MatrixXd g_next;
  gradients(problem, state.x, clip, g_next);

  Eigen::MatrixXd track = w.C * (state.y + xi);
  track -= w.C.diagonal().asDiagonal() * xi;
  state.y = (1.0 - p.alpha) * (state.y - state.g_prev) + p.gamma2 * track + g_next;
  state.g_prev = std::move(g_next);
  ++state.k;
  if (diverged(state.x) || diverged(state.y)) throw DivergenceError("alg2", state.k);
}

void draw_noise(const LaplaceNoiseSource& noise, NoiseTag tag, std::int64_t k,
                Eigen::MatrixXd& out) {
  if (!noise.enabled()) {
    out.setZero();
    return;
  }
  std::vector<double> buf(static_cast<std::size_t>(out.cols()));
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    noise.sample(static_cast<std::size_t>(i), tag, k, buf);
    for (Eigen::Index c = 0; c < out.cols(); ++c) out(i, c) = buf[c];
  }
}

SolverSetup::SolverSetup(Variant v, QuadraticEstimationProblem p)
    : variant(v), problem(std::move(p)), optimum(optimal_solution(problem)) {}

Step2Params SolverSetup::step2(std::int64_t k) const {
  return {gamma1(k), gamma2(k), alpha(k), lambda(k)};
}

Eigen::MatrixXd initial_iterates(std::uint64_t seed, int m, int d, double radius) {
  std::uint64_t counter = 0;
  const std::uint64_t key = mix64(seed ^ 0x243f6a8885a308d3ULL);
  auto uniform = [&] {
    return (static_cast<double>(mix64(key + ++counter) >> 11) + 0.5) * 0x1.0p-53;
  };
  Eigen::MatrixXd x(m, d);
  for (int i = 0; i < m; ++i) {
    for (int c = 0; c < d; ++c) {
      const double u1 = uniform();
      const double u2 = uniform();
      x(i, c) = radius * std::sqrt(-2.0 * std::log(u1)) *
                std::cos(2.0 * std::numbers::pi * u2);
    }
  }
  return x;
}

StaticConsensusState initial_static_state(const SolverSetup& setup, const RunOptions& opts) {
  return {initial_iterates(opts.seed, setup.problem.m(), setup.problem.d(), opts.init_radius),
          0};
}

TrackingState initial_tracking_state(const SolverSetup& setup, const RunOptions& opts) {
  TrackingState s;
  s.x = initial_iterates(opts.seed, setup.problem.m(), setup.problem.d(), opts.init_radius);
  gradients(setup.problem, s.x, opts.gradient_clip, s.g_prev);
  s.y = s.g_prev;
  return s;
}

TraceRecord measure(const SolverSetup& setup, const StaticConsensusState& s) {
  TraceRecord r;
  r.k = s.k;
  const Eigen::VectorXd mean = s.x.colwise().mean().transpose();
  r.consensus_error = (s.x.rowwise() - mean.transpose()).squaredNorm();
  r.optimality_gap = setup.problem.global_value(mean) - setup.optimum.value;
  r.distance_to_optimum = (mean - setup.optimum.theta).norm();
  r.tracking_error = kNaN;
  r.epsilon_partial = kNaN;
  return r;
}

TraceRecord measure(const SolverSetup& setup, const TrackingState& s) {
  const auto& w = *setup.push_pull;
  const double m = static_cast<double>(s.x.rows());
  TraceRecord r;
  r.k = s.k;
  const Eigen::VectorXd mean = (w.u.transpose() * s.x).transpose() / m;
  r.consensus_error = (s.x.rowwise() - mean.transpose()).squaredNorm();
  r.optimality_gap = setup.problem.global_value(mean) - setup.optimum.value;
  r.distance_to_optimum = (mean - setup.optimum.theta).norm();
  const Eigen::RowVectorXd ybar = s.y.colwise().mean();
  r.tracking_error = (s.y - w.v * ybar).squaredNorm();
  r.epsilon_partial = kNaN;
  return r;
}

Trace run(const SolverSetup& setup, const RunOptions& opts) {
  if (opts.iterations < 0) throw RangeError("iterations must be >= 0");
  if (opts.stride < 1) throw RangeError("stride must be >= 1");
  const bool tracking = is_tracking(setup.variant);
  if (tracking && !setup.push_pull) throw ConfigError("push-pull weights missing");
  if (!tracking && !setup.consensus) throw ConfigError("consensus weights missing");

  const LaplaceNoiseSource noise = setup.nu ? LaplaceNoiseSource(*setup.nu, opts.seed)
                                            : LaplaceNoiseSource::disabled();
  const auto* eps = opts.epsilon_partial;
  Trace trace;
  trace.stride = opts.stride;
  auto keep = [&](TraceRecord r) {
    if (eps && r.k < static_cast<std::int64_t>(eps->size())) r.epsilon_partial = (*eps)[r.k];
    trace.records.push_back(r);
  };
  auto due = [&](std::int64_t k) { return k % opts.stride == 0 || k == opts.iterations; };

  const int m = setup.problem.m();
  const int d = setup.problem.d();
  Eigen::MatrixXd zeta = Eigen::MatrixXd::Zero(m, d);
  Eigen::MatrixXd xi = Eigen::MatrixXd::Zero(m, d);
  try {
    if (tracking) {
      TrackingState s = initial_tracking_state(setup, opts);
      keep(measure(setup, s));
      for (std::int64_t k = 0; k < opts.iterations; ++k) {
        draw_noise(noise, NoiseTag::kState, k, zeta);
        draw_noise(noise, NoiseTag::kTracker, k, xi);
        step_algorithm2(s, *setup.push_pull, setup.step2(k), zeta, xi, setup.problem,
                        opts.gradient_clip);
        if (due(s.k)) keep(measure(setup, s));
      }
    } else {
      StaticConsensusState s = initial_static_state(setup, opts);
      keep(measure(setup, s));
      for (std::int64_t k = 0; k < opts.iterations; ++k) {
        draw_noise(noise, NoiseTag::kState, k, zeta);
        step_algorithm1(s, setup.consensus->W, setup.step1(k), zeta, setup.problem,
                        opts.gradient_clip);
        if (due(s.k)) keep(measure(setup, s));
      }
    }
  } catch (const DivergenceError& e) {
    trace.divergence = Divergence{std::string(to_string(setup.variant)), e.iteration()};
  }
  return trace;
}

}  // namespace dpopt
