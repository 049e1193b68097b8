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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "dpopt/errors.hpp"
#include "dpopt/schedules.hpp"

using namespace dpopt;

namespace {

const PowerSchedule kLambda = PowerSchedule::decaying(0.02, 0.1, 1.0);
const PowerSchedule kGamma = PowerSchedule::decaying(1.0, 0.1, 0.9);
const PowerSchedule kNu1 = PowerSchedule::growing(1.0, 0.1, 0.3);
const PowerSchedule kGamma1 = PowerSchedule::decaying(1.0, 0.1, 0.9);
const PowerSchedule kGamma2 = PowerSchedule::decaying(1.0, 0.1, 0.7);
const PowerSchedule kNu2 = PowerSchedule::growing(1.0, 0.1, 0.1);

Algorithm2Schedules alg2_set() { return {kLambda, kLambda, kGamma1, kGamma2, kNu2}; }

std::set<std::string> failed(const ConditionReport& r) {
  const auto v = r.failed_names();
  return {v.begin(), v.end()};
}

double partial_sum(const SeriesExpr& e, std::int64_t K) {
  double s = 0.0;
  for (std::int64_t k = 0; k <= K; ++k) s += e(k);
  return s;
}

}  // namespace

TEST_CASE("eval matches the closed forms") {
  CHECK(kLambda(0) == doctest::Approx(0.02).epsilon(1e-15));
  CHECK(kLambda(10) == doctest::Approx(0.01).epsilon(1e-15));
  CHECK(PowerSchedule::constant(1.0)(12345) == 1.0);
  CHECK(PowerSchedule::geometric(2.0, 0.5)(3) == doctest::Approx(0.25));
  CHECK(kNu1(1000) == doctest::Approx(1.0 + 0.1 * std::pow(1000.0, 0.3)));
  CHECK(kGamma.eval(7) == kGamma(7));
}

TEST_CASE("decaying forms never increase and growing forms never decrease") {
  for (std::int64_t k = 0; k < 10000; ++k) {
    REQUIRE(kLambda(k + 1) <= kLambda(k));
    REQUIRE(kGamma2(k + 1) <= kGamma2(k));
    REQUIRE(kNu1(k + 1) >= kNu1(k));
    REQUIRE(kNu2(k + 1) >= kNu2(k));
  }
}

TEST_CASE("invalid schedules are rejected") {
  CHECK_THROWS_AS(PowerSchedule::decaying(0.0, 0.1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(PowerSchedule::decaying(1.0, -0.1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(PowerSchedule::growing(1.0, 0.1, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(PowerSchedule::geometric(1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(PowerSchedule::constant(0.0), std::invalid_argument);
  CHECK_THROWS_AS(parse_schedule_form("logarithmic"), std::invalid_argument);
  CHECK(parse_schedule_form("geometric") == ScheduleForm::kGeometric);
}

TEST_CASE("series_class uses exponent arithmetic") {
  const auto lg = series_class(SeriesExpr(kLambda).pow(2.0) / kGamma);
  CHECK(lg.kind == SeriesKind::kConvergentSum);
  CHECK(lg.exponent == doctest::Approx(1.1));

  const auto g = series_class(kGamma);
  CHECK(g.kind == SeriesKind::kDivergentSum);
  CHECK(g.exponent == doctest::Approx(0.9));

  const auto gn = series_class(SeriesExpr(kGamma).pow(2.0) * SeriesExpr(kNu1).pow(2.0));
  CHECK(gn.kind == SeriesKind::kConvergentSum);
  CHECK(gn.exponent == doctest::Approx(1.2));

  CHECK(series_class(kLambda).kind == SeriesKind::kDivergentSum);  // harmonic boundary
  const auto geo = series_class(SeriesExpr(PowerSchedule::geometric(1.0, 0.95)) *
                                SeriesExpr(kNu1).pow(5.0));
  CHECK(geo.kind == SeriesKind::kConvergentSum);
  CHECK(geo.rule == "ratio test");
  const auto grow = series_class(SeriesExpr(kLambda) / PowerSchedule::geometric(1.0, 0.9));
  CHECK(grow.kind == SeriesKind::kDivergentSum);
}

TEST_CASE("limit_class ties are finite, strict gaps are zero or infinite") {
  CHECK(limit_class(SeriesExpr(kLambda) / kLambda).kind == LimitKind::kFinite);
  CHECK(limit_class(SeriesExpr(kLambda) / kGamma).kind == LimitKind::kZero);
  CHECK(limit_class(SeriesExpr(kGamma) / kLambda).kind == LimitKind::kInfinite);
  CHECK(limit_class(SeriesExpr(kGamma1).pow(2.0) / kGamma2).exponent ==
        doctest::Approx(-1.1));
}

TEST_CASE("classification agrees with numeric partial sums") {
  // Expressions whose tails are short enough for the 1% / 5% decade rule.
  const std::vector<SeriesExpr> convergent = {
      SeriesExpr(kGamma1).pow(2.0),
      SeriesExpr(kGamma1).pow(2.0) * SeriesExpr::constant(2.0) * SeriesExpr(kNu2).pow(2.0),
      SeriesExpr(PowerSchedule::geometric(1.0, 0.95))};
  const std::vector<SeriesExpr> divergent = {kGamma, kGamma2, kLambda,
                                             SeriesExpr(kLambda) * kNu2};
  for (const auto& e : convergent) {
    REQUIRE(series_class(e).kind == SeriesKind::kConvergentSum);
    const double a = partial_sum(e, 100000);
    const double b = partial_sum(e, 1000000);
    CHECK((b - a) < 0.01 * a);
  }
  for (const auto& e : divergent) {
    REQUIRE(series_class(e).kind == SeriesKind::kDivergentSum);
    const double a = partial_sum(e, 100000);
    const double b = partial_sum(e, 1000000);
    CHECK(b > 1.05 * a);
  }
}

TEST_CASE("near-boundary convergent sums shrink their decade increments") {
  // e in (1, 1.3]: the tail after 1e5 is still several percent of the sum,
  // so the test is that decade increments shrink.
  const std::vector<SeriesExpr> slow = {
      SeriesExpr(kLambda).pow(2.0) / kGamma,
      SeriesExpr(kGamma).pow(2.0) * SeriesExpr::constant(2.0) * SeriesExpr(kNu1).pow(2.0),
      SeriesExpr(kLambda) / kNu1, SeriesExpr(kGamma1).pow(2.0) / kGamma2};
  for (const auto& e : slow) {
    const auto c = series_class(e);
    REQUIRE(c.kind == SeriesKind::kConvergentSum);
    const double s4 = partial_sum(e, 10000);
    const double s5 = partial_sum(e, 100000);
    const double s6 = partial_sum(e, 1000000);
    const double ratio = (s6 - s5) / (s5 - s4);
    CHECK(ratio > 0.0);
    CHECK(ratio < 0.9);
  }
  const double h4 = partial_sum(kLambda, 10000);
  const double h5 = partial_sum(kLambda, 100000);
  const double h6 = partial_sum(kLambda, 1000000);
  CHECK((h6 - h5) / (h5 - h4) > 0.97);
}

TEST_CASE("theorem-1 list on the reference schedules") {
  const ConditionReport r = validate_theorem1({kLambda, kGamma, kNu1});
  CHECK(r.overall());
  CHECK(r.entries().size() == 5);
  CHECK(r.warnings().empty());

  CHECK(failed(validate_theorem1({kLambda, kGamma.with_p(1.1), kNu1})) ==
        std::set<std::string>{"Σγ = ∞", "Σλ²/γ < ∞"});
  const ConditionReport flat_nu = validate_theorem1({kLambda, kGamma, PowerSchedule::constant(1.0)});
  CHECK(failed(flat_nu) == std::set<std::string>{"Σλ/ν < ∞"});
  CHECK(flat_nu.find("Σλ/ν < ∞")->value == doctest::Approx(1.0));

  const ConditionReport flat_gamma =
      validate_theorem1({kLambda, PowerSchedule::constant(0.5), kNu1});
  CHECK(flat_gamma.warnings().size() == 1);
}

TEST_CASE("theorem-3 list on the reference schedules") {
  const ConditionReport r = validate_theorem3(alg2_set());
  CHECK(r.overall());
  CHECK(r.entries().size() == 16);

  auto s = alg2_set();
  s.gamma1 = kGamma1.with_p(0.4);
  const ConditionReport g1 = validate_theorem3(s);
  CHECK(g1.find("Σ(γ₁)² < ∞")->value == doctest::Approx(0.8));
  CHECK(failed(g1) ==
        std::set<std::string>{"Σ(γ₁)² < ∞", "Σ(γ₁)²/γ₂ < ∞", "Σ(γ₁)²·2ν² < ∞"});

  s = alg2_set();
  s.alpha = kLambda.with_p(0.5);
  const ConditionReport a = validate_theorem3(s);
  CHECK(a.find("Σα²/γ₂ < ∞")->value == doctest::Approx(0.3));
  CHECK(failed(a) == std::set<std::string>{"Σα²/γ₂ < ∞"});

  s = alg2_set();
  s.gamma2 = kGamma2.with_p(0.95);
  const ConditionReport g2 = validate_theorem3(s);
  CHECK(g2.find("Σ(γ₁)²/γ₂ < ∞")->value == doctest::Approx(0.85));
  CHECK(failed(g2) == std::set<std::string>{"Σ(γ₁)²/γ₂ < ∞"});
}

TEST_CASE("pass/fail is invariant under positive rescaling of any schedule") {
  const double scales[] = {1e-3, 0.37, 3.7, 250.0};
  const auto base1 = validate_theorem1({kLambda, kGamma, PowerSchedule::constant(1.0)});
  const auto base3 = validate_theorem3(alg2_set());
  for (double c : scales) {
    const auto r1 = validate_theorem1(
        {kLambda.scaled(c), kGamma.scaled(c), PowerSchedule::constant(1.0).scaled(c)});
    CHECK(failed(r1) == failed(base1));
    auto s = alg2_set();
    s.lambda = s.lambda.scaled(c);
    s.alpha = s.alpha.with_a(c * s.alpha.a());
    s.gamma2 = s.gamma2.scaled(c);
    s.nu = s.nu.scaled(c);
    CHECK(failed(validate_theorem3(s)) == failed(base3));
  }
}

TEST_CASE("report table lists every entry and the overall line") {
  const std::string t = validate_theorem1({kLambda, kGamma, kNu1}).to_table();
  CHECK(t.find("Σλ²/γ < ∞") != std::string::npos);
  CHECK(t.find("overall: PASS") != std::string::npos);
}

TEST_CASE("chung recursion ratio stays bounded") {
  const PowerSchedule alpha = PowerSchedule::decaying(1.0, 1.0, 0.9);
  const PowerSchedule beta = PowerSchedule::decaying(1.0, 1.0, 1.8);
  const ChungResult r = chung_rate_check(alpha, beta, 1.0, 100000);

  // Direct recursion oracle.
  double v = 1.0;
  double worst = 0.0;
  for (std::int64_t k = 0; k < 100000; ++k) {
    v = (1.0 - alpha(k)) * v + beta(k);
    const double ratio = v * alpha(k + 1) / beta(k + 1);
    REQUIRE(r.ratio[k + 1] == doctest::Approx(ratio).epsilon(1e-12));
    worst = std::max(worst, ratio);
  }
  CHECK(r.max_ratio == doctest::Approx(worst));
  CHECK(std::isfinite(r.max_ratio));
  CHECK(r.max_ratio_in(10000, 100000) <= 1.05 * r.max_ratio_in(1000, 10000));

  const ChungResult zero = chung_rate_check(alpha, std::nullopt, 1.0, 1000);
  CHECK(zero.max_ratio == 0.0);

  const ChungResult cold = chung_rate_check(alpha, beta, 0.0, 100000);
  CHECK(cold.max_ratio <= 1.1 * r.max_ratio);
  CHECK(cold.max_ratio_in(1000, 100000) ==
        doctest::Approx(r.max_ratio_in(1000, 100000)).epsilon(0.1));
}

TEST_CASE("chung preconditions raise condition errors") {
  const PowerSchedule beta = PowerSchedule::decaying(1.0, 1.0, 1.8);
  CHECK_THROWS_AS(chung_rate_check(PowerSchedule::decaying(1.0, 1.0, 1.1), beta, 1.0, 10),
                  ConditionError);
  CHECK_THROWS_AS(chung_rate_check(PowerSchedule::constant(0.5), beta, 1.0, 10),
                  ConditionError);
  CHECK_THROWS_AS(chung_rate_check(PowerSchedule::decaying(1.0, 1.0, 0.9),
                                   PowerSchedule::decaying(1.0, 1.0, 0.5), 1.0, 10),
                  ConditionError);
}
