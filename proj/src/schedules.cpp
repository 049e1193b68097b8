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

#include "dpopt/schedules.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "dpopt/errors.hpp"

namespace dpopt {

std::string_view to_string(ScheduleForm form) {
  switch (form) {
    case ScheduleForm::kDecaying: return "decaying";
    case ScheduleForm::kGrowing: return "growing";
    case ScheduleForm::kGeometric: return "geometric";
    case ScheduleForm::kConstant: return "constant";
  }
  return "?";
}

ScheduleForm parse_schedule_form(std::string_view name) {
  if (name == "decaying") return ScheduleForm::kDecaying;
  if (name == "growing") return ScheduleForm::kGrowing;
  if (name == "geometric") return ScheduleForm::kGeometric;
  if (name == "constant") return ScheduleForm::kConstant;
  throw std::invalid_argument("unsupported schedule form '" + std::string(name) +
                              "' (expected decaying|growing|geometric|constant)");
}

PowerSchedule::PowerSchedule(ScheduleForm form, double a, double b, double p,
                             double r)
    : form_(form), a_(a), b_(b), p_(p), r_(r) {
  const bool zero_constant = form == ScheduleForm::kConstant && a == 0.0;
  if (!(std::isfinite(a) && (a > 0.0 || zero_constant))) {
    throw std::invalid_argument("schedule coefficient a must be positive");
  }
  if (!(std::isfinite(b) && b >= 0.0)) {
    throw std::invalid_argument("schedule coefficient b must be nonnegative");
  }
  if (!(std::isfinite(p) && p >= 0.0)) {
    throw std::invalid_argument("schedule exponent p must be nonnegative");
  }
  if (form == ScheduleForm::kGeometric && !(r > 0.0 && r < 1.0)) {
    throw std::invalid_argument("geometric ratio r must lie in (0, 1)");
  }
}

PowerSchedule PowerSchedule::decaying(double a, double b, double p) {
  return PowerSchedule(ScheduleForm::kDecaying, a, b, p, 1.0);
}

PowerSchedule PowerSchedule::growing(double a, double b, double p) {
  return PowerSchedule(ScheduleForm::kGrowing, a, b, p, 1.0);
}

PowerSchedule PowerSchedule::geometric(double a, double r) {
  return PowerSchedule(ScheduleForm::kGeometric, a, 0.0, 0.0, r);
}

PowerSchedule PowerSchedule::constant(double a) {
  if (a == 0.0) throw std::invalid_argument("schedule coefficient a must be positive");
  return PowerSchedule(ScheduleForm::kConstant, a, 0.0, 0.0, 1.0);
}

PowerSchedule PowerSchedule::zero() {
  return PowerSchedule(ScheduleForm::kConstant, 0.0, 0.0, 0.0, 1.0);
}

double PowerSchedule::operator()(std::int64_t k) const {
  const double kk = static_cast<double>(k);
  switch (form_) {
    case ScheduleForm::kDecaying: return a_ / (1.0 + b_ * std::pow(kk, p_));
    case ScheduleForm::kGrowing: return a_ + b_ * std::pow(kk, p_);
    case ScheduleForm::kGeometric: return a_ * std::pow(r_, kk);
    case ScheduleForm::kConstant: return a_;
  }
  return a_;
}

double PowerSchedule::log_value(std::int64_t k) const {
  if (form_ == ScheduleForm::kGeometric) {
    return std::log(a_) + static_cast<double>(k) * std::log(r_);
  }
  return std::log((*this)(k));
}

double PowerSchedule::power() const {
  const bool varies = b_ > 0.0 && p_ > 0.0;
  switch (form_) {
    case ScheduleForm::kDecaying: return varies ? -p_ : 0.0;
    case ScheduleForm::kGrowing: return varies ? p_ : 0.0;
    default: return 0.0;
  }
}

double PowerSchedule::log_ratio() const {
  return form_ == ScheduleForm::kGeometric ? std::log(r_) : 0.0;
}

PowerSchedule PowerSchedule::scaled(double c) const {
  if (!(c > 0.0)) throw std::invalid_argument("scale must be positive");
  PowerSchedule s = *this;
  s.a_ *= c;
  if (form_ == ScheduleForm::kGrowing) s.b_ *= c;
  return s;
}

PowerSchedule PowerSchedule::with_a(double a) const {
  return PowerSchedule(form_, a, b_, p_, r_);
}

PowerSchedule PowerSchedule::with_p(double p) const {
  return PowerSchedule(form_, a_, b_, p, r_);
}

std::string PowerSchedule::describe() const {
  std::ostringstream os;
  switch (form_) {
    case ScheduleForm::kDecaying:
      os << a_ << "/(1+" << b_ << "k^" << p_ << ")";
      break;
    case ScheduleForm::kGrowing:
      os << a_ << "+" << b_ << "k^" << p_;
      break;
    case ScheduleForm::kGeometric:
      os << a_ << "*" << r_ << "^k";
      break;
    case ScheduleForm::kConstant:
      os << a_;
      break;
  }
  return os.str();
}

SeriesExpr::SeriesExpr(const PowerSchedule& s) : factors_{{s, 1.0}} {}

SeriesExpr SeriesExpr::constant(double c) {
  if (!(c > 0.0)) throw std::invalid_argument("constant factor must be positive");
  SeriesExpr e;
  e.scale_ = c;
  return e;
}

SeriesExpr SeriesExpr::pow(double e) const {
  SeriesExpr out = *this;
  for (auto& f : out.factors_) f.exponent *= e;
  out.scale_ = std::pow(scale_, e);
  return out;
}

SeriesExpr operator*(SeriesExpr lhs, const SeriesExpr& rhs) {
  lhs.factors_.insert(lhs.factors_.end(), rhs.factors_.begin(), rhs.factors_.end());
  lhs.scale_ *= rhs.scale_;
  return lhs;
}

SeriesExpr operator/(SeriesExpr lhs, const SeriesExpr& rhs) {
  return lhs * rhs.pow(-1.0);
}

double SeriesExpr::operator()(std::int64_t k) const {
  double v = scale_;
  for (const auto& f : factors_) v *= std::pow(f.schedule(k), f.exponent);
  return v;
}

double SeriesExpr::power() const {
  double q = 0.0;
  for (const auto& f : factors_) q += f.exponent * f.schedule.power();
  return q;
}

double SeriesExpr::log_ratio() const {
  double lr = 0.0;
  for (const auto& f : factors_) lr += f.exponent * f.schedule.log_ratio();
  return lr;
}

std::string_view to_string(SeriesKind kind) {
  switch (kind) {
    case SeriesKind::kDivergentSum: return "divergent-sum";
    case SeriesKind::kConvergentSum: return "convergent-sum";
    case SeriesKind::kIndeterminate: return "indeterminate";
  }
  return "?";
}

std::string_view to_string(LimitKind kind) {
  switch (kind) {
    case LimitKind::kZero: return "zero";
    case LimitKind::kFinite: return "finite";
    case LimitKind::kInfinite: return "infinite";
  }
  return "?";
}

SeriesClass series_class(const SeriesExpr& expr) {
  const double lr = expr.log_ratio();
  const double e = -expr.power();
  if (!std::isfinite(lr) || !std::isfinite(e)) {
    return {SeriesKind::kIndeterminate, e, lr, "none"};
  }
  if (lr < -kExponentTolerance) {
    return {SeriesKind::kConvergentSum, e, lr, "ratio test"};
  }
  if (lr > kExponentTolerance) {
    return {SeriesKind::kDivergentSum, e, lr, "ratio test"};
  }
  const bool converges = e > 1.0 + kExponentTolerance;
  return {converges ? SeriesKind::kConvergentSum : SeriesKind::kDivergentSum, e,
          0.0, "p-series"};
}

LimitClass limit_class(const SeriesExpr& expr) {
  const double lr = expr.log_ratio();
  const double q = expr.power();
  if (lr < -kExponentTolerance) return {LimitKind::kZero, q};
  if (lr > kExponentTolerance) return {LimitKind::kInfinite, q};
  if (q < -kExponentTolerance) return {LimitKind::kZero, q};
  if (q > kExponentTolerance) return {LimitKind::kInfinite, q};
  return {LimitKind::kFinite, q};
}

namespace {

void require_divergent(ConditionReport& r, std::string name, const SeriesExpr& e) {
  const SeriesClass c = series_class(e);
  r.add(std::move(name), c.rule, c.exponent, c.kind == SeriesKind::kDivergentSum,
        std::string(to_string(c.kind)));
}

void require_convergent(ConditionReport& r, std::string name, const SeriesExpr& e) {
  const SeriesClass c = series_class(e);
  r.add(std::move(name), c.rule, c.exponent, c.kind == SeriesKind::kConvergentSum,
        std::string(to_string(c.kind)));
}

void require_limit(ConditionReport& r, std::string name, const SeriesExpr& e,
                   bool strict_zero) {
  const LimitClass c = limit_class(e);
  const bool pass = strict_zero ? c.kind == LimitKind::kZero
                                : c.kind != LimitKind::kInfinite;
  r.add(std::move(name), "exponent comparison", c.exponent, pass,
        std::string(to_string(c.kind)));
}

bool is_flat(const PowerSchedule& s) {
  return s.power() == 0.0 && s.log_ratio() == 0.0;
}

}  // namespace

ConditionReport validate_theorem1(const Algorithm1Schedules& s) {
  const SeriesExpr lam = s.lambda, gam = s.gamma, nu = s.nu;
  const SeriesExpr var = SeriesExpr::constant(2.0) * nu.pow(2.0);

  ConditionReport r;
  require_divergent(r, "Σγ = ∞", gam);
  require_divergent(r, "Σλ = ∞", lam);
  require_convergent(r, "Σλ²/γ < ∞", lam.pow(2.0) / gam);
  require_convergent(r, "Σγ²·2ν² < ∞", gam.pow(2.0) * var);
  require_convergent(r, "Σλ/ν < ∞", lam / nu);
  if (is_flat(s.gamma)) {
    r.warn("γ is constant; decaying coupling is assumed by the noise and privacy analysis");
  }
  return r;
}

ConditionReport validate_theorem3(const Algorithm2Schedules& s) {
  const SeriesExpr lam = s.lambda, alpha = s.alpha, g1 = s.gamma1, g2 = s.gamma2,
                   nu = s.nu;
  const SeriesExpr var = SeriesExpr::constant(2.0) * nu.pow(2.0);

  ConditionReport r;
  require_divergent(r, "Σγ₁ = ∞", g1);
  require_divergent(r, "Σγ₂ = ∞", g2);
  require_convergent(r, "Σ(γ₁)² < ∞", g1.pow(2.0));
  require_convergent(r, "Σ(γ₂)² < ∞", g2.pow(2.0));
  require_divergent(r, "Σα = ∞", alpha);
  require_divergent(r, "Σλ = ∞", lam);
  require_convergent(r, "Σλ²/γ₁ < ∞", lam.pow(2.0) / g1);
  require_convergent(r, "Σλ²/γ₂ < ∞", lam.pow(2.0) / g2);
  require_limit(r, "lim λ/γ₁ = 0", lam / g1, true);
  require_limit(r, "lim λ/γ₂ = 0", lam / g2, true);
  require_limit(r, "lim λ/α < ∞", lam / alpha, false);
  require_convergent(r, "Σα²/γ₂ < ∞", alpha.pow(2.0) / g2);
  require_convergent(r, "Σ(γ₁)²/γ₂ < ∞", g1.pow(2.0) / g2);
  require_convergent(r, "Σ(γ₁)²·2ν² < ∞", g1.pow(2.0) * var);
  require_convergent(r, "Σ(γ₂)²·2ν² < ∞", g2.pow(2.0) * var);
  require_convergent(r, "Σλ/ν < ∞", lam / nu);
  return r;
}

double ChungResult::max_ratio_in(std::int64_t k_lo, std::int64_t k_hi) const {
  const auto last = static_cast<std::int64_t>(ratio.size()) - 1;
  k_lo = std::max<std::int64_t>(k_lo, 1);
  k_hi = std::min(k_hi, last);
  double m = 0.0;
  for (std::int64_t k = k_lo; k <= k_hi; ++k) m = std::max(m, ratio[k]);
  return m;
}

ChungResult chung_rate_check(const PowerSchedule& alpha,
                             const std::optional<PowerSchedule>& beta, double v0,
                             std::int64_t k_max) {
  if (k_max < 1) throw RangeError("chung_rate_check needs K_max >= 1");
  if (v0 < 0.0) throw ConditionError("chung_rate_check needs v0 >= 0");
  if (series_class(alpha).kind != SeriesKind::kDivergentSum) {
    throw ConditionError("chung_rate_check: Σα must diverge");
  }
  if (limit_class(alpha).kind != LimitKind::kZero) {
    throw ConditionError("chung_rate_check: α must tend to 0");
  }
  if (beta && limit_class(SeriesExpr(*beta) / alpha).kind != LimitKind::kZero) {
    throw ConditionError("chung_rate_check: β/α must tend to 0");
  }

  ChungResult out;
  out.ratio.assign(static_cast<std::size_t>(k_max) + 1, 0.0);
  double v = v0;
  for (std::int64_t k = 0; k < k_max; ++k) {
    v = (1.0 - alpha(k)) * v + (beta ? (*beta)(k) : 0.0);
    const std::int64_t next = k + 1;
    double ratio;
    if (beta) {
      ratio = v * alpha(next) / (*beta)(next);
    } else {
      ratio = v == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    }
    out.ratio[next] = ratio;
    out.max_ratio = std::max(out.max_ratio, ratio);
  }
  return out;
}

}  // namespace dpopt
