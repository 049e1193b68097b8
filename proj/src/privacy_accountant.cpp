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

#include "dpopt/privacy_accountant.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dpopt/errors.hpp"

namespace dpopt {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRatioSlack = 1e-9;

Asymptote of(const SeriesExpr& e) { return {e.power(), e.log_ratio(), true}; }

Asymptote times(Asymptote a, Asymptote b) {
  return {a.power + b.power, a.log_ratio + b.log_ratio, a.determined && b.determined};
}

Asymptote over(Asymptote a, Asymptote b) {
  return {a.power - b.power, a.log_ratio - b.log_ratio, a.determined && b.determined};
}

// The slower-decaying of two sequences dominates their sum.
Asymptote dominant(Asymptote a, Asymptote b) {
  if (!a.determined || !b.determined) return {0.0, 0.0, false};
  if (std::abs(a.log_ratio - b.log_ratio) > kExponentTolerance) {
    return a.log_ratio > b.log_ratio ? a : b;
  }
  return a.power >= b.power ? a : b;
}

bool flat(const PowerSchedule& s) { return s.power() == 0.0 && s.log_ratio() == 0.0; }

// Contraction c^k = Σ coef·s^k in a recursion v^{k+1} = (1 − c^k)v^k + inc^k.
// Returns the asymptote of v.
Asymptote recursion_asymptote(Asymptote inc,
                              const std::vector<std::pair<PowerSchedule, double>>& terms) {
  double c0 = 0.0;
  bool polynomial = false;
  double q = -kInf;
  for (const auto& [s, coef] : terms) {
    if (coef == 0.0) continue;
    if (flat(s)) {
      c0 += coef * s(0);
    } else if (s.log_ratio() == 0.0) {
      polynomial = true;
      q = std::max(q, s.power());
    } else if (s.log_ratio() < 0.0) {
      // Geometric coupling is summable; keep only if something else contracts.
    } else {
      return {0.0, 0.0, false};
    }
  }
  if (c0 > 0.0) {
    if (c0 >= 1.0) return {0.0, 0.0, false};
    return dominant(inc, Asymptote{0.0, std::log1p(-c0), true});
  }
  if (polynomial && std::abs(inc.log_ratio) <= kExponentTolerance && inc.determined) {
    return {inc.power - q, 0.0, true};
  }
  return {0.0, 0.0, false};
}

double env_alg1(const PowerSchedule& gamma, Envelope e, std::int64_t k) {
  return e == Envelope::kConstant ? 1.0 : gamma(k);
}

double env_alg2(const PowerSchedule& lambda, const PowerSchedule& gamma2, Envelope e,
                std::int64_t k) {
  return e == Envelope::kConstant ? 1.0 : gamma2(k) * lambda(k);
}

void finish_ledger(PrivacyLedger& L, const PowerSchedule& nu, double scale) {
  const auto T = L.horizon;
  L.per_term.assign(static_cast<std::size_t>(T) + 1, 0.0);
  L.epsilon_partial.assign(static_cast<std::size_t>(T) + 1, 0.0);
  for (std::int64_t k = 1; k <= T; ++k) {
    // Log space keeps ς/ν finite when a geometric ν underflows.
    const double sig = L.varsigma_total(k);
    L.per_term[k] = sig == 0.0 ? 0.0 : scale * L.C * std::exp(std::log(sig) - nu.log_value(k));
    L.epsilon_partial[k] = L.epsilon_partial[k - 1] + L.per_term[k];
  }
}

double ratio_of(double diff, double bound) {
  if (bound > 0.0) return diff / bound;
  return diff == 0.0 ? 0.0 : kInf;
}

}  // namespace

std::string_view to_string(Envelope e) {
  return e == Envelope::kConstant ? "constant" : "attenuated";
}

Envelope parse_envelope(std::string_view name) {
  if (name == "constant") return Envelope::kConstant;
  if (name == "attenuated") return Envelope::kAttenuated;
  throw std::invalid_argument("unknown envelope '" + std::string(name) + "'");
}

std::string_view to_string(TailStatus s) {
  switch (s) {
    case TailStatus::kFinite: return "finite";
    case TailStatus::kInfinite: return "infinite";
    case TailStatus::kUndetermined: return "undetermined";
  }
  return "?";
}

std::vector<double> sensitivity_series_alg1(const PowerSchedule& lambda,
                                            const PowerSchedule& gamma, double wbar,
                                            std::int64_t T, Envelope envelope) {
  if (T < 0) throw RangeError("horizon must be >= 0");
  for (std::int64_t k = 0; k <= T; ++k) {
    if (wbar * gamma(k) >= 1.0) {
      throw RangeError("w̄γ^k >= 1 at k = " + std::to_string(k) +
                       "; coupling too strong for the sensitivity bound");
    }
  }
  std::vector<double> s(static_cast<std::size_t>(T) + 1, 0.0);
  if (T >= 1) s[1] = lambda(0) * env_alg1(gamma, envelope, 0);
  for (std::int64_t k = 1; k < T; ++k) {
    s[k + 1] = (1.0 - wbar * gamma(k)) * s[k] + lambda(k) * env_alg1(gamma, envelope, k);
  }
  return s;
}

TrackingSensitivity sensitivity_series_alg2(const PowerSchedule& lambda,
                                            const PowerSchedule& alpha,
                                            const PowerSchedule& gamma1,
                                            const PowerSchedule& gamma2, double Rbar,
                                            double Cbar, std::int64_t T, Envelope envelope) {
  if (T < 0) throw RangeError("horizon must be >= 0");
  for (std::int64_t k = 0; k <= T; ++k) {
    if (alpha(k) + Cbar * gamma2(k) >= 1.0) {
      throw RangeError("α^k + C̄γ₂^k >= 1 at k = " + std::to_string(k));
    }
    if (Rbar * gamma1(k) >= 1.0) {
      throw RangeError("R̄γ₁^k >= 1 at k = " + std::to_string(k));
    }
  }
  auto env = [&](std::int64_t k) { return env_alg2(lambda, gamma2, envelope, k); };
  TrackingSensitivity out;
  out.x.assign(static_cast<std::size_t>(T) + 1, 0.0);
  out.y.assign(static_cast<std::size_t>(T) + 1, 0.0);
  out.y[0] = env(0);
  if (T >= 1) out.y[1] = env(1) + (1.0 - alpha(0)) * env(0);
  for (std::int64_t k = 1; k < T; ++k) {
    out.y[k + 1] = (1.0 - alpha(k) - Cbar * gamma2(k)) * out.y[k] + env(k + 1) +
                   (1.0 - alpha(k)) * env(k);
  }
  for (std::int64_t k = 0; k < T; ++k) {
    out.x[k + 1] = (1.0 - Rbar * gamma1(k)) * out.x[k] + lambda(k) * out.y[k];
  }
  return out;
}

double PrivacyLedger::varsigma_total(std::int64_t k) const {
  return algorithm == LedgerAlgorithm::kStaticConsensus ? varsigma.at(k)
                                                        : varsigma.at(k) + varsigma_y.at(k);
}

PrivacyLedger build_ledger_alg1(const Algorithm1Schedules& s, double wbar, double C,
                                std::int64_t T, Envelope envelope) {
  if (!(C >= 0.0)) throw RangeError("gradient bound C must be >= 0");
  PrivacyLedger L;
  L.algorithm = LedgerAlgorithm::kStaticConsensus;
  L.envelope = envelope;
  L.C = C;
  L.wbar = wbar;
  L.horizon = T;
  L.varsigma = sensitivity_series_alg1(s.lambda, s.gamma, wbar, T, envelope);
  finish_ledger(L, s.nu, 1.0);

  L.lambda_over_nu = series_class(SeriesExpr(s.lambda) / s.nu);
  Asymptote inc = of(s.lambda);
  if (envelope == Envelope::kAttenuated) inc = times(inc, of(s.gamma));
  const Asymptote sig = recursion_asymptote(inc, {{s.gamma, wbar}});
  L.term_asymptote = over(sig, of(s.nu));
  return L;
}

PrivacyLedger build_ledger_alg2(const Algorithm2Schedules& s, double Rbar, double Cbar,
                                double C, std::int64_t T, Envelope envelope) {
  if (!(C >= 0.0)) throw RangeError("gradient bound C must be >= 0");
  PrivacyLedger L;
  L.algorithm = LedgerAlgorithm::kTracking;
  L.envelope = envelope;
  L.C = C;
  L.Rbar = Rbar;
  L.Cbar = Cbar;
  L.horizon = T;
  auto sens = sensitivity_series_alg2(s.lambda, s.alpha, s.gamma1, s.gamma2, Rbar, Cbar, T,
                                      envelope);
  L.varsigma = std::move(sens.x);
  L.varsigma_y = std::move(sens.y);
  finish_ledger(L, s.nu, 2.0);

  L.lambda_over_nu = series_class(SeriesExpr(s.lambda) / s.nu);
  const Asymptote env = envelope == Envelope::kConstant
                            ? Asymptote{}
                            : times(of(s.gamma2), of(s.lambda));
  const Asymptote sig_y = recursion_asymptote(env, {{s.alpha, 1.0}, {s.gamma2, Cbar}});
  const Asymptote sig_x = recursion_asymptote(times(of(s.lambda), sig_y), {{s.gamma1, Rbar}});
  L.term_asymptote = over(dominant(sig_x, sig_y), of(s.nu));
  return L;
}

EpsilonBound epsilon_bound(const PrivacyLedger& ledger, std::int64_t T) {
  if (T < 0 || T > ledger.horizon) {
    throw RangeError("T = " + std::to_string(T) + " outside the ledger horizon " +
                     std::to_string(ledger.horizon));
  }
  EpsilonBound out;
  out.epsilon = ledger.epsilon_partial[T];
  out.per_term.assign(ledger.per_term.begin() + 1, ledger.per_term.begin() + T + 1);
  return out;
}

TailEstimate budget_tail_estimate(const PrivacyLedger& ledger, std::int64_t T) {
  if (T < 2 || T > ledger.horizon) {
    throw RangeError("tail estimate needs 2 <= T <= ledger horizon");
  }
  TailEstimate out;
  out.bound = kInf;
  if (ledger.lambda_over_nu.kind != SeriesKind::kConvergentSum) {
    out.status = TailStatus::kInfinite;
    out.rule = "Σλ/ν diverges";
    return out;
  }
  const Asymptote& a = ledger.term_asymptote;
  if (!a.determined) {
    out.status = TailStatus::kUndetermined;
    out.rule = "no power-law or geometric envelope";
    return out;
  }
  const double term = ledger.per_term[T];
  if (term == 0.0) {
    out.status = TailStatus::kFinite;
    out.bound = 0.0;
    out.rule = "zero terms";
    return out;
  }
  if (a.log_ratio > kExponentTolerance) {
    out.status = TailStatus::kInfinite;
    out.rule = "terms grow geometrically";
    return out;
  }
  if (a.log_ratio < -kExponentTolerance) {
    const double local = term / ledger.per_term[T - 1];
    const double rho = std::max(std::exp(a.log_ratio), local);
    out.exponent = rho;
    if (rho >= 1.0) {
      out.status = TailStatus::kUndetermined;
      out.rule = "geometric envelope not yet contracting";
      return out;
    }
    out.status = TailStatus::kFinite;
    out.bound = term * rho / (1.0 - rho);
    out.rule = "geometric envelope";
    return out;
  }
  const double e_asym = -a.power;
  if (e_asym <= 1.0 + kExponentTolerance) {
    out.status = TailStatus::kInfinite;
    out.exponent = e_asym;
    out.rule = "terms decay like k^-e with e <= 1";
    return out;
  }
  std::int64_t k0 = static_cast<std::int64_t>(std::floor(static_cast<double>(T) / 1.1));
  k0 = std::clamp<std::int64_t>(k0, 1, T - 1);
  const double e_loc = -std::log(term / ledger.per_term[k0]) /
                       std::log(static_cast<double>(T) / static_cast<double>(k0));
  const double e = std::min(e_asym, e_loc);
  out.exponent = e;
  if (!(e > 1.0)) {
    out.status = TailStatus::kUndetermined;
    out.rule = "local decay exponent <= 1 at T";
    return out;
  }
  out.status = TailStatus::kFinite;
  out.bound = term * static_cast<double>(T) / (e - 1.0);
  out.rule = "integral test";
  return out;
}

CoupledDifferenceTrace coupled_difference_trace(const SolverSetup& setup,
                                                const AdjacentVariant& adjacent,
                                                const RunOptions& opts, DifferenceMode mode,
                                                double C, Envelope envelope) {
  const std::int64_t T = opts.iterations;
  if (T < 0) throw RangeError("iterations must be >= 0");
  const bool harvest = mode == DifferenceMode::kHarvest;
  if (harvest) envelope = Envelope::kConstant;
  const int i = adjacent.agent();
  const int m = setup.problem.m();
  const int d = setup.problem.d();
  const LaplaceNoiseSource noise = setup.nu ? LaplaceNoiseSource(*setup.nu, opts.seed)
                                            : LaplaceNoiseSource::disabled();
  Eigen::MatrixXd zeta = Eigen::MatrixXd::Zero(m, d);
  Eigen::MatrixXd xi = Eigen::MatrixXd::Zero(m, d);
  const Eigen::VectorXd unit = Eigen::VectorXd::Constant(d, 1.0 / d);

  CoupledDifferenceTrace out;
  out.diff_x.assign(static_cast<std::size_t>(T) + 1, 0.0);
  out.ratio.assign(static_cast<std::size_t>(T) + 1, 0.0);
  auto note = [&](std::int64_t k, double r) {
    out.ratio[k] = r;
    out.max_ratio = std::max(out.max_ratio, r);
    if (r > 1.0 + kRatioSlack && !out.first_violation) out.first_violation = k;
  };

  if (!is_tracking(setup.variant)) {
    const auto& W = setup.consensus->W;
    const auto sig = sensitivity_series_alg1(setup.lambda, setup.gamma,
                                             setup.consensus->min_diag_mag, T, envelope);
    StaticConsensusState p = initial_static_state(setup, opts);
    Eigen::VectorXd e = Eigen::VectorXd::Zero(d);
    double G = 0.0;
    for (std::int64_t k = 0; k < T; ++k) {
      Eigen::VectorXd gd;
      if (harvest) {
        const Eigen::VectorXd xi_k = p.x.row(i).transpose();
        gd = setup.problem.local_gradient(i, xi_k) - adjacent.gradient(i, xi_k - e);
      } else {
        gd = C * env_alg1(setup.gamma, envelope, k) * unit;
      }
      G = std::max(G, gd.lpNorm<1>());
      e = (1.0 + W(i, i) * setup.gamma(k)) * e - setup.lambda(k) * gd;
      if (harvest) {
        draw_noise(noise, NoiseTag::kState, k, zeta);
        step_algorithm1(p, W, setup.step1(k), zeta, setup.problem);
      }
      out.diff_x[k + 1] = e.lpNorm<1>();
      note(k + 1, ratio_of(out.diff_x[k + 1], (harvest ? G : C) * sig[k + 1]));
    }
    out.harvested_C = G;
    return out;
  }

  const auto& w = *setup.push_pull;
  const auto sens = sensitivity_series_alg2(setup.lambda, setup.alpha, setup.gamma1,
                                            setup.gamma2, w.min_diag_R, w.min_diag_C, T,
                                            envelope);
  auto env = [&](std::int64_t k) {
    return env_alg2(setup.lambda, setup.gamma2, envelope, k);
  };
  out.diff_y.assign(static_cast<std::size_t>(T) + 1, 0.0);
  TrackingState p = initial_tracking_state(setup, opts);
  Eigen::VectorXd dx = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd gd;
  double sigma = 1.0;
  if (harvest) {
    const Eigen::VectorXd x0 = p.x.row(i).transpose();
    gd = setup.problem.local_gradient(i, x0) - adjacent.gradient(i, x0);
  } else {
    gd = 2.0 * C * env(0) * sigma * unit;
  }
  Eigen::VectorXd dy = gd;
  double G = gd.lpNorm<1>();
  const double M = 2.0 * C;
  out.diff_y[0] = dy.lpNorm<1>();
  note(0, ratio_of(out.diff_y[0], (harvest ? G : M) * sens.y[0]));

  for (std::int64_t k = 0; k < T; ++k) {
    const double a = 1.0 - setup.alpha(k) + setup.gamma2(k) * w.C(i, i);
    const double b = 1.0 + setup.gamma1(k) * w.R(i, i);
    const double keep = 1.0 - setup.alpha(k);
    const double G_prev = G;
    dx = b * dx - setup.lambda(k) * dy;
    Eigen::VectorXd gd_next;
    if (harvest) {
      draw_noise(noise, NoiseTag::kState, k, zeta);
      draw_noise(noise, NoiseTag::kTracker, k, xi);
      step_algorithm2(p, w, setup.step2(k), zeta, xi, setup.problem);
      const Eigen::VectorXd xk = p.x.row(i).transpose();
      gd_next = setup.problem.local_gradient(i, xk) - adjacent.gradient(i, xk - dx);
    } else {
      // All coordinates share one sign; pick the one that grows |dy|.
      const double delta = dy.sum();
      const double g_k = gd.sum();
      sigma = (a * delta - keep * g_k) >= 0.0 ? 1.0 : -1.0;
      gd_next = 2.0 * C * env(k + 1) * sigma * unit;
    }
    dy = a * dy + gd_next - keep * gd;
    gd = std::move(gd_next);
    G = std::max(G, gd.lpNorm<1>());

    out.diff_x[k + 1] = dx.lpNorm<1>();
    out.diff_y[k + 1] = dy.lpNorm<1>();
    const double rx = ratio_of(out.diff_x[k + 1], (harvest ? G_prev : M) * sens.x[k + 1]);
    const double ry = ratio_of(out.diff_y[k + 1], (harvest ? G : M) * sens.y[k + 1]);
    note(k + 1, std::max(rx, ry));
  }
  out.harvested_C = G / 2.0;
  return out;
}

}  // namespace dpopt
