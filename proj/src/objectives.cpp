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

#include "dpopt/objectives.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "dpopt/dp_noise.hpp"
#include "dpopt/errors.hpp"

namespace dpopt {

QuadraticEstimationProblem::QuadraticEstimationProblem(std::vector<Eigen::MatrixXd> M,
                                                       std::vector<Eigen::VectorXd> z,
                                                       double sigma_reg)
    : M_(std::move(M)), z_(std::move(z)), sigma_reg_(sigma_reg) {
  if (M_.empty()) throw std::invalid_argument("problem needs at least one agent");
  if (M_.size() != z_.size()) throw std::invalid_argument("M and z sizes differ");
  if (!(sigma_reg >= 0.0)) throw std::invalid_argument("regularization must be >= 0");
  const auto s = M_.front().rows();
  const auto d = M_.front().cols();
  if (s < 1 || d < 1) throw std::invalid_argument("empty measurement matrix");
  for (std::size_t i = 0; i < M_.size(); ++i) {
    if (M_[i].rows() != s || M_[i].cols() != d || z_[i].size() != s) {
      throw std::invalid_argument("inconsistent dimensions for agent " + std::to_string(i));
    }
    hessian_.push_back(2.0 * (M_[i].transpose() * M_[i] +
                              sigma_reg_ * Eigen::MatrixXd::Identity(d, d)));
    linear_.push_back(2.0 * M_[i].transpose() * z_[i]);
  }
}

double QuadraticEstimationProblem::local_value(int i, const Eigen::VectorXd& theta) const {
  return (z_[i] - M_[i] * theta).squaredNorm() + sigma_reg_ * theta.squaredNorm();
}

Eigen::VectorXd QuadraticEstimationProblem::local_gradient(int i,
                                                           const Eigen::VectorXd& theta) const {
  return 2.0 * M_[i].transpose() * (M_[i] * theta - z_[i]) + 2.0 * sigma_reg_ * theta;
}

void QuadraticEstimationProblem::local_gradient_into(int i, const double* theta,
                                                     double* out) const {
  const auto d = hessian_[i].rows();
  Eigen::Map<const Eigen::VectorXd> t(theta, d);
  Eigen::Map<Eigen::VectorXd> g(out, d);
  g.noalias() = hessian_[i] * t;
  g -= linear_[i];
}

double QuadraticEstimationProblem::global_value(const Eigen::VectorXd& theta) const {
  double sum = 0.0;
  for (int i = 0; i < m(); ++i) sum += local_value(i, theta);
  return sum / m();
}

Eigen::VectorXd QuadraticEstimationProblem::global_gradient(const Eigen::VectorXd& theta) const {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(d());
  for (int i = 0; i < m(); ++i) g += local_gradient(i, theta);
  return g / m();
}

OptimalSolution optimal_solution(const QuadraticEstimationProblem& problem) {
  const int d = problem.d();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(d, d);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(d);
  for (int i = 0; i < problem.m(); ++i) {
    A += problem.M(i).transpose() * problem.M(i);
    b += problem.M(i).transpose() * problem.z(i);
  }
  A.diagonal().array() += problem.m() * problem.sigma_reg();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().cwiseAbs().maxCoeff();
  if (!(lo > 1e-12 * std::max(1.0, hi))) {
    throw DegeneracyError("normal equations are singular (min eigenvalue " +
                          std::to_string(lo) + ")");
  }
  OptimalSolution out;
  out.theta = A.llt().solve(b);
  out.value = problem.global_value(out.theta);
  return out;
}

double lipschitz_constant(const QuadraticEstimationProblem& problem) {
  double L = 0.0;
  for (int i = 0; i < problem.m(); ++i) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(problem.M(i));
    const double smax = svd.singularValues()[0];
    L = std::max(L, 2.0 * (smax * smax + problem.sigma_reg()));
  }
  return L;
}

AdjacentVariant::AdjacentVariant(const QuadraticEstimationProblem& base, int agent,
                                 double delta, double eta)
    : base_(&base), agent_(agent), delta_(delta), eta_(eta) {
  if (agent < 0 || agent >= base.m()) throw std::invalid_argument("agent out of range");
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
  if (!(eta >= 0.0)) throw std::invalid_argument("eta must be nonnegative");
  theta_star_ = optimal_solution(base).theta;
}

Eigen::VectorXd AdjacentVariant::g_diff(const Eigen::VectorXd& theta) const {
  const Eigen::VectorXd off = theta - theta_star_;
  const double r = off.norm();
  if (r <= delta_) return Eigen::VectorXd::Zero(theta.size());
  return -eta_ * (r - delta_) / r * off;
}

Eigen::VectorXd AdjacentVariant::gradient(int j, const Eigen::VectorXd& theta) const {
  Eigen::VectorXd g = base_->local_gradient(j, theta);
  if (j == agent_) g -= g_diff(theta);
  return g;
}

RandomInstance random_instance(std::uint64_t seed, int m, int s, int d, double sigma_reg,
                               double noise_std) {
  if (m < 1 || s < 1 || d < 1) throw std::invalid_argument("m, s, d must be >= 1");
  if (!(noise_std >= 0.0)) throw std::invalid_argument("noise_std must be >= 0");
  std::uint64_t counter = 0;
  auto uniform = [&] {
    const std::uint64_t h = mix64(seed ^ mix64(++counter));
    return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
  };
  auto normal = [&] {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  };

  Eigen::VectorXd theta(d);
  for (int c = 0; c < d; ++c) theta[c] = normal();
  std::vector<Eigen::MatrixXd> M;
  std::vector<Eigen::VectorXd> z;
  for (int i = 0; i < m; ++i) {
    Eigen::MatrixXd Mi(s, d);
    for (int r = 0; r < s; ++r) {
      for (int c = 0; c < d; ++c) Mi(r, c) = normal();
    }
    Eigen::VectorXd zi = Mi * theta;
    for (int r = 0; r < s; ++r) zi[r] += noise_std * normal();
    M.push_back(std::move(Mi));
    z.push_back(std::move(zi));
  }
  return {QuadraticEstimationProblem(std::move(M), std::move(z), sigma_reg), theta};
}

}  // namespace dpopt
