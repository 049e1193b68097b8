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

#include "dpopt/dp_noise.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dpopt {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  return mix64(mix64(base) ^ mix64(index + 0x5851f42d4c957f2dULL));
}

double laplace_quantile(double q, double nu) {
  const double c = q - 0.5;
  if (c == 0.0) return 0.0;
  const double s = c > 0.0 ? 1.0 : -1.0;
  return -nu * s * std::log1p(-2.0 * std::abs(c));
}

LaplaceNoiseSource::LaplaceNoiseSource(PowerSchedule nu, std::uint64_t seed)
    : nu_(nu), seed_(seed) {}

LaplaceNoiseSource LaplaceNoiseSource::disabled() { return LaplaceNoiseSource(); }

double LaplaceNoiseSource::scale_at(std::int64_t k) const {
  return nu_ ? (*nu_)(k) : 0.0;
}

double LaplaceNoiseSource::variance_at(std::int64_t k) const {
  const double nu = scale_at(k);
  return 2.0 * nu * nu;
}

double LaplaceNoiseSource::uniform(std::size_t agent, NoiseTag tag, std::int64_t k,
                                   std::size_t coord) const {
  std::uint64_t h = mix64(seed_);
  h = mix64(h ^ static_cast<std::uint64_t>(agent));
  h = mix64(h ^ static_cast<std::uint64_t>(tag));
  h = mix64(h ^ static_cast<std::uint64_t>(k));
  h = mix64(h ^ static_cast<std::uint64_t>(coord));
  const double u = static_cast<double>(h >> 11);
  return (u + 0.5) * 0x1.0p-53;
}

void LaplaceNoiseSource::sample(std::size_t agent, NoiseTag tag, std::int64_t k,
                                std::span<double> out) const {
  if (!nu_) {
    for (double& v : out) v = 0.0;
    return;
  }
  const double nu = (*nu_)(k);
  for (std::size_t c = 0; c < out.size(); ++c) {
    out[c] = laplace_quantile(uniform(agent, tag, k, c), nu);
  }
}

std::vector<double> LaplaceNoiseSource::sample(std::size_t agent, NoiseTag tag,
                                               std::int64_t k, std::size_t dim) const {
  if (dim < 1) throw std::invalid_argument("sample dimension must be >= 1");
  std::vector<double> out(dim);
  sample(agent, tag, k, out);
  return out;
}

ConditionReport validate_noise_conditions(const PowerSchedule& nu,
                                          const std::vector<PowerSchedule>& attenuations) {
  ConditionReport r;
  const SeriesExpr var = SeriesExpr::constant(2.0) * SeriesExpr(nu).pow(2.0);
  const char* names1[] = {"Σγ²·2ν² < ∞"};
  const char* names2[] = {"Σ(γ₁)²·2ν² < ∞", "Σ(γ₂)²·2ν² < ∞"};
  for (std::size_t i = 0; i < attenuations.size(); ++i) {
    std::string name;
    if (attenuations.size() == 1) {
      name = names1[0];
    } else if (attenuations.size() == 2) {
      name = names2[i];
    } else {
      name = "Σ(γ" + std::to_string(i + 1) + ")²·2ν² < ∞";
    }
    const SeriesClass c = series_class(SeriesExpr(attenuations[i]).pow(2.0) * var);
    r.add(name, c.rule, c.exponent, c.kind == SeriesKind::kConvergentSum,
          std::string(to_string(c.kind)));
  }
  return r;
}

}  // namespace dpopt
