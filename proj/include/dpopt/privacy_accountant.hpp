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
#include <string>
#include <string_view>
#include <vector>

#include "dpopt/objectives.hpp"
#include "dpopt/schedules.hpp"
#include "dpopt/solvers.hpp"

namespace dpopt {

/// Gradient-difference envelope behind the sensitivity recursions.
/// kConstant: ‖∇f_i − ∇f'_i‖₁ ≤ C at every k.
/// kAttenuated: the difference decays like Cγ^k (static consensus) or
/// Cγ₂^kλ^k (gradient tracking).
enum class Envelope { kConstant, kAttenuated };

std::string_view to_string(Envelope e);
Envelope parse_envelope(std::string_view name);

/// Index k = 0..T; entry 0 is 0. Throws RangeError if w̄γ^k ≥ 1 for some k < T.
std::vector<double> sensitivity_series_alg1(const PowerSchedule& lambda,
                                            const PowerSchedule& gamma, double wbar,
                                            std::int64_t T,
                                            Envelope envelope = Envelope::kConstant);

struct TrackingSensitivity {
  std::vector<double> x;  // ς_x^k, k = 0..T, ς_x⁰ = 0
  std::vector<double> y;  // ς_y^k, k = 0..T, ς_y⁰ = envelope at k = 0
};

/// Throws RangeError if α^k + C̄γ₂^k ≥ 1 or R̄γ₁^k ≥ 1 for some k < T.
TrackingSensitivity sensitivity_series_alg2(const PowerSchedule& lambda,
                                            const PowerSchedule& alpha,
                                            const PowerSchedule& gamma1,
                                            const PowerSchedule& gamma2, double Rbar,
                                            double Cbar, std::int64_t T,
                                            Envelope envelope = Envelope::kConstant);

enum class LedgerAlgorithm { kStaticConsensus, kTracking };

/// Polynomial exponent and geometric log-ratio of a sequence as k → ∞.
struct Asymptote {
  double power = 0.0;
  double log_ratio = 0.0;
  bool determined = true;
};

struct PrivacyLedger {
  LedgerAlgorithm algorithm = LedgerAlgorithm::kStaticConsensus;
  Envelope envelope = Envelope::kConstant;
  double C = 1.0;
  double wbar = 0.0;
  double Rbar = 0.0;
  double Cbar = 0.0;
  std::int64_t horizon = 0;
  std::vector<double> varsigma;    // ς (static) or ς_x (tracking)
  std::vector<double> varsigma_y;  // tracking only
  std::vector<double> per_term;    // index k = 1..T, entry 0 is 0
  std::vector<double> epsilon_partial;
  SeriesClass lambda_over_nu{SeriesKind::kIndeterminate, 0.0, 0.0, "none"};
  Asymptote term_asymptote;

  /// ς^k for static consensus, ς_x^k + ς_y^k for tracking.
  double varsigma_total(std::int64_t k) const;
  double epsilon(std::int64_t T) const { return epsilon_partial.at(T); }
};

/// Sensitivities plus per-term contributions C·ς^k/ν(k) summed to ε_T.
PrivacyLedger build_ledger_alg1(const Algorithm1Schedules& s, double wbar, double C,
                                std::int64_t T, Envelope envelope = Envelope::kConstant);
/// Per-term contributions 2C·(ς_x^k + ς_y^k)/ν(k).
PrivacyLedger build_ledger_alg2(const Algorithm2Schedules& s, double Rbar, double Cbar,
                                double C, std::int64_t T,
                                Envelope envelope = Envelope::kConstant);

struct EpsilonBound {
  double epsilon = 0.0;
  std::vector<double> per_term;  // k = 1..T
};

/// ε_T and the per-term breakdown. T must not exceed the ledger horizon.
EpsilonBound epsilon_bound(const PrivacyLedger& ledger, std::int64_t T);

enum class TailStatus { kFinite, kInfinite, kUndetermined };
std::string_view to_string(TailStatus s);

struct TailEstimate {
  TailStatus status = TailStatus::kUndetermined;
  double bound = 0.0;  // +inf unless finite
  double exponent = 0.0;  // effective decay exponent or ratio
  std::string rule;
};

/// Upper estimate of ε_∞ − ε_T from a dominating envelope anchored at the
/// term value at T. Returns the infinite marker when Σλ/ν diverges or the
/// per-term contributions are not summable.
TailEstimate budget_tail_estimate(const PrivacyLedger& ledger, std::int64_t T);

/// kHarvest uses the running max of the observed gradient difference; the
/// other modes inject a sign-adversarial difference of the ledger envelope.
enum class DifferenceMode { kHarvest, kConstant };

struct CoupledDifferenceTrace {
  std::vector<double> diff_x;  // ‖x_i^k − x'_i^k‖₁, k = 0..T
  std::vector<double> diff_y;  // tracking only
  std::vector<double> ratio;   // max over components of diff / bound
  double max_ratio = 0.0;
  std::optional<std::int64_t> first_violation;
  double harvested_C = 0.0;
  bool ok() const { return !first_violation; }
};

/// Observation-matched difference dynamics of agent `adjacent.agent()`
/// along the noisy trajectory of the base problem. A ratio above
/// 1 + 1e-9 is reported as a violation, never thrown.
CoupledDifferenceTrace coupled_difference_trace(const SolverSetup& setup,
                                                const AdjacentVariant& adjacent,
                                                const RunOptions& opts, DifferenceMode mode,
                                                double C = 1.0,
                                                Envelope envelope = Envelope::kConstant);

}  // namespace dpopt
