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

// Acceptance checks. Prints one PASS/FAIL line per criterion; exit code 0
// only if every selected criterion passes. `--only N` selects one.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dpopt/config.hpp"
#include "dpopt/dp_noise.hpp"
#include "dpopt/harness.hpp"
#include "dpopt/privacy_accountant.hpp"
#include "dpopt/schedules.hpp"

using namespace dpopt;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string config_path(const char* name) {
  return std::string(DPOPT_SOURCE_DIR) + "/configs/" + name;
}

const PowerSchedule kLambda = PowerSchedule::decaying(0.02, 0.1, 1.0);
const PowerSchedule kGamma = PowerSchedule::decaying(1.0, 0.1, 0.9);
const PowerSchedule kNu1 = PowerSchedule::growing(1.0, 0.1, 0.3);
const PowerSchedule kGamma1 = PowerSchedule::decaying(1.0, 0.1, 0.9);
const PowerSchedule kGamma2 = PowerSchedule::decaying(1.0, 0.1, 0.7);
const PowerSchedule kNu2 = PowerSchedule::growing(1.0, 0.1, 0.1);

Algorithm1Schedules alg1_set() { return {kLambda, kGamma, kNu1}; }
Algorithm2Schedules alg2_set() { return {kLambda, kLambda, kGamma1, kGamma2, kNu2}; }

std::set<std::string> failed(const ConditionReport& r) {
  const auto v = r.failed_names();
  return {v.begin(), v.end()};
}

std::string join(const std::set<std::string>& s) {
  std::string out;
  for (const auto& x : s) out += (out.empty() ? "" : ", ") + x;
  return "{" + out + "}";
}

// Hand-derived flip sets. The perturbed exponent is listed first; the other
// members are co-violations that follow from the same exponent arithmetic.
Outcome criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o{true, ""};
  auto note = [&](bool ok, const std::string& what) {
    o.pass = o.pass && ok;
    if (!ok) o.detail += what + "; ";
  };

  const ConditionReport r1 = validate_theorem1(alg1_set());
  const ConditionReport n1 = validate_noise_conditions(kNu1, {kGamma});
  note(r1.overall() && n1.overall(), "alg1 reference set fails " + join(failed(r1)));
  const ConditionReport r3 = validate_theorem3(alg2_set());
  const ConditionReport n3 = validate_noise_conditions(kNu2, {kGamma1, kGamma2});
  note(r3.overall() && n3.overall(), "alg2 reference set fails " + join(failed(r3)));

  struct Case {
    std::string label;
    std::string named;
    ConditionReport report;
    std::set<std::string> expected;
  };
  std::vector<Case> cases;
  {
    auto s = alg1_set();
    s.gamma = kGamma.with_p(1.1);
    cases.push_back({"alg1 γ p=1.1", "Σγ = ∞", validate_theorem1(s), {"Σγ = ∞", "Σλ²/γ < ∞"}});
  }
  {
    auto s = alg1_set();
    s.nu = PowerSchedule::constant(1.0);
    cases.push_back({"alg1 ν ≡ 1", "Σλ/ν < ∞", validate_theorem1(s), {"Σλ/ν < ∞"}});
  }
  {
    auto s = alg2_set();
    s.gamma1 = kGamma1.with_p(0.4);
    cases.push_back({"alg2 γ₁ p=0.4", "Σ(γ₁)² < ∞", validate_theorem3(s),
                     {"Σ(γ₁)² < ∞", "Σ(γ₁)²/γ₂ < ∞", "Σ(γ₁)²·2ν² < ∞"}});
  }
  {
    auto s = alg2_set();
    s.alpha = kLambda.with_p(0.5);
    cases.push_back({"alg2 α p=0.5", "Σα²/γ₂ < ∞", validate_theorem3(s), {"Σα²/γ₂ < ∞"}});
  }
  {
    auto s = alg2_set();
    s.gamma2 = kGamma2.with_p(0.95);
    cases.push_back(
        {"alg2 γ₂ p=0.95", "Σ(γ₁)²/γ₂ < ∞", validate_theorem3(s), {"Σ(γ₁)²/γ₂ < ∞"}});
  }
  for (const auto& c : cases) {
    const auto got = failed(c.report);
    note(got.count(c.named) == 1, c.label + ": named condition did not flip");
    note(got == c.expected, c.label + ": flipped " + join(got) + ", expected " + join(c.expected));
  }

  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  note(secs < 1.0, "runtime " + num(secs) + " s");
  o.detail = (o.pass ? "" : o.detail) + std::to_string(cases.size()) +
             " perturbations checked, runtime " + num(secs) + " s";
  return o;
}

Outcome criterion2() {
  const ExperimentConfig cfg = load_experiment(config_path("alg1_estimation.cfg"));
  const ExperimentRun run = run_experiment(cfg, Variant::kAlg1);
  const auto& first = run.agg.rows.front();
  const auto& last = run.agg.rows.back();
  const double g = last.mean_gap / first.mean_gap;
  const double c = last.mean_consensus / first.mean_consensus;
  Outcome o;
  o.pass = run.agg.runs == 100 && last.k == 10000 && g < 0.1 && c < 1e-3;
  o.detail = "N=" + std::to_string(run.agg.runs) + " T=" + std::to_string(last.k) +
             ": gap ratio " + num(g) + " (< 0.1), consensus ratio " + num(c) + " (< 1e-3)";
  return o;
}

struct Summary {
  std::string name;
  MeanSe ms;
  double eps = std::numeric_limits<double>::quiet_NaN();
  int diverged = 0;
};

Summary summarize(const ExperimentConfig& cfg, Variant v) {
  const ExperimentRun run = run_experiment(cfg, v);
  Summary s{std::string(to_string(v)), mean_and_se(run.agg.final_gaps)};
  if (run.ledger) s.eps = run.ledger->epsilon(cfg.iterations);
  s.diverged = run.agg.diverged;
  return s;
}

// Strict ordering with non-overlapping ±1 SE intervals; a baseline with
// diverged runs has an infinite mean and is worse than any finite result.
bool separated(const Summary& a, const Summary& b) {
  if (!std::isfinite(a.ms.mean)) return false;
  if (!std::isfinite(b.ms.mean)) return true;
  return a.ms.mean < b.ms.mean && a.ms.mean + a.ms.se < b.ms.mean - b.ms.se;
}

std::string show(const Summary& s) {
  return s.name + " " + num(s.ms.mean) + " ± " + num(s.ms.se) +
         (s.diverged ? " (" + std::to_string(s.diverged) + " diverged)" : "");
}

Outcome criterion3() {
  const ExperimentConfig cfg = load_experiment(config_path("alg1_estimation.cfg"));
  const Summary a = summarize(cfg, Variant::kAlg1);
  const Summary d = summarize(cfg, Variant::kDgd);
  const Summary p = summarize(cfg, Variant::kPdopAlg1);
  const double match = std::abs(p.eps / a.eps - 1.0);
  Outcome o;
  o.pass = separated(a, d) && separated(a, p) && match < 0.05;
  o.detail = show(a) + " vs " + show(d) + ", " + show(p) + "; ε " + num(a.eps) + " vs " +
             num(p.eps) + " (mismatch " + num(match) + ")";
  return o;
}

Outcome criterion4() {
  const ExperimentConfig cfg = load_experiment(config_path("alg2_estimation.cfg"));
  const Summary a = summarize(cfg, Variant::kAlg2);
  const Summary p = summarize(cfg, Variant::kPushPull);
  return {separated(a, p), show(a) + " vs " + show(p)};
}

Outcome criterion5() {
  ExperimentConfig cfg = load_experiment(config_path("alg2_estimation.cfg"));
  cfg.noise_enabled = false;
  const SolverSetup setup = make_setup(cfg, Variant::kAlg2);
  RunOptions o;
  o.seed = derive_seed(cfg.noise_seed, 0);
  o.init_radius = cfg.init_radius;
  TrackingState s = initial_tracking_state(setup, o);
  const int m = setup.problem.m(), d = setup.problem.d();
  const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(m, d);
  double worst = (s.y.colwise().mean() - s.g_prev.colwise().mean()).cwiseAbs().maxCoeff();
  for (std::int64_t k = 0; k < 10000; ++k) {
    step_algorithm2(s, *setup.push_pull, setup.step2(k), zero, zero, setup.problem);
    worst = std::max(worst,
                     (s.y.colwise().mean() - s.g_prev.colwise().mean()).cwiseAbs().maxCoeff());
  }
  return {worst < 1e-10, "max ‖ȳ − ḡ‖∞ over 1e4 steps = " + num(worst)};
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

template <class A, class B>
double product_sum(std::int64_t k, A a, B b) {
  double s = b(k - 1);
  for (std::int64_t p = 1; p <= k - 1; ++p) {
    double prod = 1.0;
    for (std::int64_t q = p; q <= k - 1; ++q) prod *= a(q);
    s += prod * b(p - 1);
  }
  return s;
}

Outcome criterion6() {
  const ExperimentConfig c1 = load_experiment(config_path("alg1_estimation.cfg"));
  const ExperimentConfig c2 = load_experiment(config_path("alg2_estimation.cfg"));
  const SolverSetup s1 = make_setup(c1, Variant::kAlg1);
  const SolverSetup s2 = make_setup(c2, Variant::kAlg2);
  const double wbar = s1.consensus->min_diag_mag;
  const double Rbar = s2.push_pull->min_diag_R, Cbar = s2.push_pull->min_diag_C;

  const auto v1 = sensitivity_series_alg1(s1.lambda, s1.gamma, wbar, 50);
  const auto v2 = sensitivity_series_alg2(s2.lambda, s2.alpha, s2.gamma1, s2.gamma2, Rbar, Cbar, 50);
  double worst = 0.0;
  for (std::int64_t k = 1; k <= 50; ++k) {
    worst = std::max(worst, rel(v1[k], product_sum(k, [&](std::int64_t q) { return 1.0 - wbar * s1.gamma(q); },
                                                     [&](std::int64_t p) { return s1.lambda(p); })));
    worst = std::max(worst, rel(v2.y[k], product_sum(k,
                                                      [&](std::int64_t q) {
                                                        return 1.0 - s2.alpha(q) - Cbar * s2.gamma2(q);
                                                      },
                                                      [&](std::int64_t p) { return 2.0 - s2.alpha(p); })));
    worst = std::max(worst, rel(v2.x[k], product_sum(k,
                                                      [&](std::int64_t q) { return 1.0 - Rbar * s2.gamma1(q); },
                                                      [&](std::int64_t p) { return s2.lambda(p) * v2.y[p]; })));
  }

  double ratio = 0.0;
  for (const auto* pair : {&c1, &c2}) {
    const SolverSetup& s = pair == &c1 ? s1 : s2;
    const AdjacentVariant adj(s.problem, pair->adjacent_agent, pair->adjacent_delta,
                              pair->adjacent_eta);
    RunOptions o;
    o.iterations = 10000;
    o.seed = derive_seed(pair->noise_seed, 0);
    o.init_radius = pair->init_radius;
    const auto tr = coupled_difference_trace(s, adj, o, DifferenceMode::kConstant, 1.0);
    ratio = std::max(ratio, tr.max_ratio);
  }
  return {worst < 1e-12 && ratio <= 1.0 + 1e-9,
          "closed-form max rel diff " + num(worst) + " (< 1e-12), coupled max ratio " + num(ratio) +
              " (≤ 1 + 1e-9)"};
}

struct BudgetCheck {
  double growth = 0.0;
  double tail_fraction = 0.0;
  std::string tail_status;
};

BudgetCheck budget_numbers(const PrivacyLedger& L) {
  BudgetCheck b;
  b.growth = L.epsilon(100000) / L.epsilon(10000) - 1.0;
  const TailEstimate t = budget_tail_estimate(L, 100000);
  b.tail_fraction = t.bound / L.epsilon(100000);
  b.tail_status = std::string(to_string(t.status));
  return b;
}

Outcome criterion7() {
  const ExperimentConfig c1 = load_experiment(config_path("alg1_estimation.cfg"));
  const ExperimentConfig c2 = load_experiment(config_path("alg2_estimation.cfg"));
  const SolverSetup s1 = make_setup(c1, Variant::kAlg1);
  const SolverSetup s2 = make_setup(c2, Variant::kAlg2);
  bool pass = true;
  std::ostringstream d;
  for (Envelope env : {Envelope::kAttenuated, Envelope::kConstant}) {
    const auto L1 = make_ledger(s1, 1.0, env, 100000);
    const auto L2 = make_ledger(s2, 1.0, env, 100000);
    const BudgetCheck b1 = budget_numbers(*L1), b2 = budget_numbers(*L2);
    const bool ok = b1.growth < 0.05 && b1.tail_fraction < 0.05 && b2.growth < 0.05 &&
                    b2.tail_fraction < 0.05;
    // The attenuated envelope is the one under which Σλ/ν-type summability
    // holds, so it carries the verdict; constant-envelope numbers are shown.
    if (env == Envelope::kAttenuated) pass = pass && ok;
    d << to_string(env) << ": alg1 growth " << num(b1.growth) << ", tail/ε " << num(b1.tail_fraction)
      << " (" << b1.tail_status << "); alg2 growth " << num(b2.growth) << ", tail/ε "
      << num(b2.tail_fraction) << " (" << b2.tail_status << "); ";
  }
  ExperimentConfig flat = c1;
  flat.nu = PowerSchedule::constant(1.0);
  const auto Lf = make_ledger(make_setup(flat, Variant::kAlg1), 1.0, flat.envelope, 100000);
  const TailEstimate tf = budget_tail_estimate(*Lf, 100000);
  const bool marker = tf.status == TailStatus::kInfinite;
  pass = pass && marker;
  d << "constant ν marker " << (marker ? "fires" : "missing") << " (thresholds 5%)";
  return {pass, d.str()};
}

Outcome criterion8() {
  const double h = 1e-6;
  double worst = 0.0;
  for (std::uint64_t n = 0; n < 1000; ++n) {
    const std::uint64_t seed = derive_seed(8, n);
    const int m = 1 + static_cast<int>(seed % 5);
    const int s = 1 + static_cast<int>((seed >> 8) % 4);
    const int dim = 1 + static_cast<int>((seed >> 16) % 4);
    const auto p = random_instance(seed, m, s, dim, 0.01 * static_cast<double>((seed >> 24) % 10),
                                   1.0).problem;
    const Eigen::VectorXd th = initial_iterates(mix64(seed), 1, dim, 5.0).row(0).transpose();
    const int i = static_cast<int>((seed >> 32) % m);
    const Eigen::VectorXd g = p.local_gradient(i, th);
    Eigen::VectorXd fd(dim);
    for (int c = 0; c < dim; ++c) {
      Eigen::VectorXd a = th, b = th;
      a(c) += h;
      b(c) -= h;
      fd(c) = (p.local_value(i, a) - p.local_value(i, b)) / (2.0 * h);
    }
    worst = std::max(worst, (g - fd).norm() / std::max(g.norm(), 1e-12));
  }
  return {worst < 1e-6, "max relative error over 1e3 pairs = " + num(worst) + " (< 1e-6)"};
}

Outcome criterion9() {
  ExperimentConfig cfg = load_experiment(config_path("alg1_estimation.cfg"));
  cfg.noise_enabled = false;
  const SolverSetup setup = make_setup(cfg, Variant::kAlg1);
  RunOptions o;
  o.iterations = 100000;
  o.stride = 100;
  o.seed = derive_seed(cfg.noise_seed, 0);
  o.init_radius = cfg.init_radius;
  const Trace t = run(setup, o);
  if (t.divergence) return {false, "zero-noise run diverged"};
  const RateFit c = rate_fit(t, Metric::kConsensus, setup.lambda, setup.gamma, 1000, 100000);
  const RateFit g = rate_fit(t, Metric::kGap, setup.lambda, setup.gamma, 1000, 100000);
  return {c.slope >= 1.6 && g.slope >= 0.8 && c.r2 > 0.9 && g.r2 > 0.9,
          "consensus slope " + num(c.slope) + " (R² " + num(c.r2) + "), gap slope " + num(g.slope) +
              " (R² " + num(g.r2) + "); thresholds 1.6, 0.8, R² > 0.9"};
}

Outcome criterion10() {
  const PowerSchedule alpha = PowerSchedule::decaying(1.0, 1.0, 0.9);
  const PowerSchedule beta = PowerSchedule::decaying(1.0, 1.0, 1.8);
  struct Family {
    const char* name;
    std::optional<PowerSchedule> beta;
    double v0;
  };
  const Family fams[] = {{"β~k^-1.8, v0=1", beta, 1.0},
                         {"β=0, v0=1", std::nullopt, 1.0},
                         {"β~k^-1.8, v0=0", beta, 0.0}};
  bool pass = true;
  std::ostringstream d;
  for (const auto& f : fams) {
    const ChungResult r = chung_rate_check(alpha, f.beta, f.v0, 100000);
    const double late = r.max_ratio_in(10000, 100000);
    const double early = r.max_ratio_in(1000, 10000);
    const bool ok = std::isfinite(r.max_ratio) && late <= 1.05 * early;
    pass = pass && ok;
    d << f.name << ": " << num(late) << " vs " << num(early) << "; ";
  }
  d << "(last decade ≤ 1.05 × previous)";
  return {pass, d.str()};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"validator fidelity", criterion1},
      {"convergence under DP noise", criterion2},
      {"static consensus beats DGD and PDOP", criterion3},
      {"gradient tracking beats Push-Pull", criterion4},
      {"tracker conservation", criterion5},
      {"privacy recursions", criterion6},
      {"finite budget at infinity", criterion7},
      {"gradient correctness", criterion8},
      {"rate trend", criterion9},
      {"Chung ratio bounded", criterion10},
  };
  int only = 0;
  for (int a = 1; a < argc; ++a) {
    const std::string arg = argv[a];
    if (arg == "--only" && a + 1 < argc) {
      only = std::atoi(argv[++a]);
    } else {
      std::fprintf(stderr, "usage: %s [--only N]\n", argv[0]);
      return 2;
    }
  }
  if (only < 0 || only > static_cast<int>(criteria.size())) {
    std::fprintf(stderr, "--only must be in 1..%zu\n", criteria.size());
    return 2;
  }
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only && static_cast<int>(i + 1) != only) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    all = all && o.pass;
    std::printf("%s criterion %zu (%s): %s\n", o.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
