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
#include <span>
#include <vector>

#include "dpopt/condition_report.hpp"
#include "dpopt/schedules.hpp"

namespace dpopt {

enum class NoiseTag : std::uint64_t { kState = 1, kTracker = 2 };

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);
/// Seed for the index-th child stream of `base` (Monte Carlo run seeds).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

/// Inverse CDF of Laplace(0, nu) at q in (0, 1).
double laplace_quantile(double q, double nu);

/// Reproducible Laplace noise. Each draw is a pure function of
/// (seed, agent, tag, k, coordinate); a disabled source yields zeros.
class LaplaceNoiseSource {
 public:
  LaplaceNoiseSource(PowerSchedule nu, std::uint64_t seed);
  static LaplaceNoiseSource disabled();

  bool enabled() const { return nu_.has_value(); }
  std::uint64_t seed() const { return seed_; }

  /// ν(k); 0 for a disabled source.
  double scale_at(std::int64_t k) const;
  /// 2ν(k)² per coordinate.
  double variance_at(std::int64_t k) const;

  /// Uniform in the open interval (0, 1).
  double uniform(std::size_t agent, NoiseTag tag, std::int64_t k,
                 std::size_t coord) const;

  void sample(std::size_t agent, NoiseTag tag, std::int64_t k,
              std::span<double> out) const;
  std::vector<double> sample(std::size_t agent, NoiseTag tag, std::int64_t k,
                             std::size_t dim) const;

 private:
  LaplaceNoiseSource() = default;

  std::optional<PowerSchedule> nu_;
  std::uint64_t seed_ = 0;
};

/// Σ(γ)²·2ν² < ∞ for one attenuation, or both series for (γ₁, γ₂).
ConditionReport validate_noise_conditions(const PowerSchedule& nu,
                                          const std::vector<PowerSchedule>& attenuations);

}  // namespace dpopt
