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
#include <vector>

namespace dpopt {

/// f_i(θ) = ‖z_i − M_iθ‖² + ς‖θ‖², F = (1/m) Σ f_i.
class QuadraticEstimationProblem {
 public:
  QuadraticEstimationProblem(std::vector<Eigen::MatrixXd> M, std::vector<Eigen::VectorXd> z,
                             double sigma_reg);

  int m() const { return static_cast<int>(M_.size()); }
  int d() const { return static_cast<int>(M_.front().cols()); }
  int s() const { return static_cast<int>(M_.front().rows()); }
  double sigma_reg() const { return sigma_reg_; }
  const Eigen::MatrixXd& M(int i) const { return M_[i]; }
  const Eigen::VectorXd& z(int i) const { return z_[i]; }

  double local_value(int i, const Eigen::VectorXd& theta) const;
  Eigen::VectorXd local_gradient(int i, const Eigen::VectorXd& theta) const;
  /// Writes ∇f_i(θ) into out (size d) without allocating.
  void local_gradient_into(int i, const double* theta, double* out) const;

  double global_value(const Eigen::VectorXd& theta) const;
  Eigen::VectorXd global_gradient(const Eigen::VectorXd& theta) const;

 private:
  std::vector<Eigen::MatrixXd> M_;
  std::vector<Eigen::VectorXd> z_;
  std::vector<Eigen::MatrixXd> hessian_;  // 2(MᵀM + ςI)
  std::vector<Eigen::VectorXd> linear_;   // 2Mᵀz
  double sigma_reg_;
};

struct OptimalSolution {
  Eigen::VectorXd theta;
  double value = 0.0;
};

/// Solves (Σ M_iᵀM_i + mςI)θ = Σ M_iᵀz_i. Throws DegeneracyError if singular.
OptimalSolution optimal_solution(const QuadraticEstimationProblem& problem);

/// max_i 2(σ_max(M_i)² + ς).
double lipschitz_constant(const QuadraticEstimationProblem& problem);

/// Same problem except agent i, whose gradient gains a radial ramp
/// η·max(0, ‖θ−θ*‖−δ)·(θ−θ*)/‖θ−θ*‖ outside the ball B_δ(θ*).
class AdjacentVariant {
 public:
  AdjacentVariant(const QuadraticEstimationProblem& base, int agent, double delta,
                  double eta);

  int agent() const { return agent_; }
  double delta() const { return delta_; }
  double eta() const { return eta_; }
  const Eigen::VectorXd& theta_star() const { return theta_star_; }

  /// ∇f_i(θ) − ∇f'_i(θ).
  Eigen::VectorXd g_diff(const Eigen::VectorXd& theta) const;
  /// ∇f'_j(θ); equals the base gradient for j ≠ agent.
  Eigen::VectorXd gradient(int j, const Eigen::VectorXd& theta) const;

 private:
  const QuadraticEstimationProblem* base_;
  int agent_;
  double delta_;
  double eta_;
  Eigen::VectorXd theta_star_;
};

struct RandomInstance {
  QuadraticEstimationProblem problem;
  Eigen::VectorXd theta_true;
};

/// M_i with standard normal entries, z_i = M_iθ_true + w_i, w_i ~ N(0, noise_std²).
RandomInstance random_instance(std::uint64_t seed, int m, int s, int d, double sigma_reg,
                               double noise_std);

}  // namespace dpopt
