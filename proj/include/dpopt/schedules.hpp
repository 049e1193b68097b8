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

#include "dpopt/condition_report.hpp"

namespace dpopt {

enum class ScheduleForm {
  kDecaying,   // a / (1 + b k^p)
  kGrowing,    // a + b k^p
  kGeometric,  // a r^k
  kConstant,   // a
};

std::string_view to_string(ScheduleForm form);
/// Accepts "decaying", "growing", "geometric", "constant". Anything else
/// (including logarithmic families) throws std::invalid_argument.
ScheduleForm parse_schedule_form(std::string_view name);

/// A strictly positive parameter sequence from a closed power-law family.
class PowerSchedule {
 public:
  static PowerSchedule decaying(double a, double b, double p);
  static PowerSchedule growing(double a, double b, double p);
  static PowerSchedule geometric(double a, double r);
  static PowerSchedule constant(double a);
  /// Constant 0. Only for baseline variants (e.g. α ≡ 0); never classify it.
  static PowerSchedule zero();

  double operator()(std::int64_t k) const;
  double eval(std::int64_t k) const { return (*this)(k); }
  /// log value(k) without underflow for geometric forms.
  double log_value(std::int64_t k) const;

  ScheduleForm form() const { return form_; }
  double a() const { return a_; }
  double b() const { return b_; }
  double p() const { return p_; }
  double r() const { return r_; }

  /// Asymptotic polynomial exponent q with value(k) ~ k^q (q <= 0 for
  /// decaying, >= 0 for growing).
  double power() const;
  /// Natural log of the geometric ratio; 0 for non-geometric forms.
  double log_ratio() const;

  /// Whole sequence multiplied by c > 0.
  PowerSchedule scaled(double c) const;
  /// Same family with the leading coefficient a replaced.
  PowerSchedule with_a(double a) const;
  /// Same family with the exponent p replaced (decaying/growing only).
  PowerSchedule with_p(double p) const;

  std::string describe() const;

 private:
  PowerSchedule(ScheduleForm form, double a, double b, double p, double r);

  ScheduleForm form_;
  double a_;
  double b_;
  double p_;
  double r_;
};

/// Product of schedule powers times a positive constant, e.g. λ²/γ or γ²·2ν².
class SeriesExpr {
 public:
  SeriesExpr(const PowerSchedule& s);  // NOLINT: implicit by design of the algebra
  static SeriesExpr constant(double c);

  SeriesExpr pow(double e) const;
  friend SeriesExpr operator*(SeriesExpr lhs, const SeriesExpr& rhs);
  friend SeriesExpr operator/(SeriesExpr lhs, const SeriesExpr& rhs);

  double operator()(std::int64_t k) const;

  /// Net asymptotic exponent q (term ~ k^q).
  double power() const;
  double log_ratio() const;

 private:
  SeriesExpr() = default;

  struct Factor {
    PowerSchedule schedule;
    double exponent;
  };
  std::vector<Factor> factors_;
  double scale_ = 1.0;
};

enum class SeriesKind { kDivergentSum, kConvergentSum, kIndeterminate };
enum class LimitKind { kZero, kFinite, kInfinite };

std::string_view to_string(SeriesKind kind);
std::string_view to_string(LimitKind kind);

struct SeriesClass {
  SeriesKind kind;
  double exponent;   // decay exponent e, term ~ k^{-e}
  double log_ratio;  // net geometric log-ratio
  std::string rule;  // "p-series" or "ratio test"
};

/// Exponent ties closer than this are treated as equal.
inline constexpr double kExponentTolerance = 1e-9;

/// Summability of Σ expr(k) by exponent arithmetic: geometric decay wins over
/// any power; otherwise convergent iff e > 1 (e = 1 counts as divergent).
SeriesClass series_class(const SeriesExpr& expr);

struct LimitClass {
  LimitKind kind;
  double exponent;  // net power q of the ratio
};

/// Behaviour of expr(k) as k → ∞.
LimitClass limit_class(const SeriesExpr& expr);

struct Algorithm1Schedules {
  PowerSchedule lambda;
  PowerSchedule gamma;
  PowerSchedule nu;
};

struct Algorithm2Schedules {
  PowerSchedule lambda;
  PowerSchedule alpha;
  PowerSchedule gamma1;
  PowerSchedule gamma2;
  PowerSchedule nu;
};

/// Convergence conditions, noise-variance summability (σ² = 2ν²) and the
/// finite-budget condition for the static-consensus method.
ConditionReport validate_theorem1(const Algorithm1Schedules& set);

/// Same for the gradient-tracking method.
ConditionReport validate_theorem3(const Algorithm2Schedules& set);

struct ChungResult {
  double max_ratio = 0.0;
  /// ratio[k] = v^k α^k / β^k for k = 1..K_max; ratio[0] is unused (0).
  std::vector<double> ratio;

  /// Max of ratio over [k_lo, k_hi] (inclusive, clipped to the computed range).
  double max_ratio_in(std::int64_t k_lo, std::int64_t k_hi) const;
};

/// Iterates v^{k+1} = (1-α^k) v^k + β^k from v0 and tracks v^k α^k / β^k.
/// beta == nullopt means β ≡ 0; the ratio is then 0 wherever v^k = 0.
/// Throws ConditionError unless Σα = ∞, α → 0 and β/α → 0 polynomially.
ChungResult chung_rate_check(const PowerSchedule& alpha,
                             const std::optional<PowerSchedule>& beta,
                             double v0, std::int64_t k_max);

}  // namespace dpopt
