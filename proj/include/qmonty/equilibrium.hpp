// Copyright 2026 The qmonty Authors.
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

// Best responses, exploitability and Nash verification for the zero-sum
// measurement game, plus payoff sweeps over the strategy space.
//
// All gaps are in win-probability units. A gap of g in probability is a gap
// of 2g in Bob's coin gain.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "qmonty/errors.hpp"
#include "qmonty/game.hpp"

namespace qmonty {

struct StrategyProfile {
  AliceMeasurementStrategy alice;
  BobStrategy bob;

  static StrategyProfile Nash() { return {AliceMeasurementStrategy::Nash(), BobStrategy::MakeMix(0.5)}; }
};

enum class BobSpace { kMixtureOnly, kQuantum };

struct BobResponse {
  BobStrategy strategy;
  double value;
};

struct AliceResponse {
  AliceMeasurementStrategy strategy;
  double value;
};

// Best Bob decision against a fixed Alice. Over mixtures the payoff is
// linear in eta, so a pure decision is optimal; ties go to the smaller eta
// (Switch). Over coherent decisions the optimum is the top eigenvalue of the
// state Bob faces, attained at the angle of its top eigenvector.
inline BobResponse bob_best_response(const AliceMeasurementStrategy& alice, BobSpace space,
                                     RevealPosterior posterior = kThreeBoxPosterior) {
  if (space == BobSpace::kMixtureOnly) {
    const double stick = closed_form_win_probability(alice, 1.0, posterior);
    const double sw = closed_form_win_probability(alice, 0.0, posterior);
    if (stick > sw) return {BobStrategy::MakeStick(), stick};
    return {BobStrategy::MakeSwitch(), sw};
  }
  const DensityMatrix rho = BobFacingState(alice, posterior);
  // <psi_b|rho|psi_b> = (a + d)/2 + (a - d)/2 cos 2b + Re(c) sin 2b, with rho = [[a, c], [c*, d]].
  const double a = rho(0, 0).real();
  const double d = rho(1, 1).real();
  const double c = rho(0, 1).real();
  const double half_diff = 0.5 * (a - d);
  double beta = 0.0;
  if (std::hypot(half_diff, c) > kAlgebraTol) beta = 0.5 * std::atan2(c, half_diff);
  const BobStrategy strat = BobStrategy::MakeQuantum(beta);
  return {strat, bob_win_probability(rho, strat)};
}

// Alice minimizes Bob's mixture payoff. With u = sin^2(a) cos^2(a) in
// [0, 1/4], the pick-box term is stay * (eta + (2 - 4 eta) u0) and the other
// term other * ((1 - eta) + (4 eta - 2) u1). Each is minimized at an end of
// the u range: alpha = 0 (u = 0) or alpha = pi/4 (u = 1/4). Ties at eta = 1/2
// go to pi/4.
inline AliceResponse alice_best_response(const BobStrategy& bob,
                                         RevealPosterior posterior = kThreeBoxPosterior) {
  if (bob.is_quantum()) {
    throw PreconditionError("alice_best_response: Bob's strategy must be a classical mixture");
  }
  const double eta = bob.stick_weight();
  const double alpha0 = eta >= 0.5 ? kQuarterPi : 0.0;
  const double alpha1 = eta <= 0.5 ? kQuarterPi : 0.0;
  const AliceMeasurementStrategy strat(alpha0, alpha1);
  return {strat, closed_form_win_probability(strat, eta, posterior)};
}

inline double exploitability(const StrategyProfile& profile, BobSpace space,
                             RevealPosterior posterior = kThreeBoxPosterior) {
  const double value = expected_payoff(profile.alice, profile.bob, posterior).p_win;
  const double bob_gap = bob_best_response(profile.alice, space, posterior).value - value;
  const double alice_gap = value - alice_best_response(profile.bob, posterior).value;
  return std::max({0.0, bob_gap, alice_gap});
}

struct EquilibriumReport {
  StrategyProfile profile;
  double value;           // Bob's win probability under the profile
  double exploitability;  // probability units
  double tolerance;
  bool is_nash;
  AliceResponse alice_best_dev;
  BobResponse bob_best_dev;

  double gain() const { return 2.0 * value - 1.0; }
};

// Bob may deviate to any mixture or coherent decision; Alice to any pair of
// conditional measurement angles.
inline EquilibriumReport verify_nash(const StrategyProfile& profile, double tol,
                                     RevealPosterior posterior = kThreeBoxPosterior) {
  if (!(tol > 0.0)) throw DomainError("verify_nash: tolerance must be positive");
  EquilibriumReport report{profile,
                           expected_payoff(profile.alice, profile.bob, posterior).p_win,
                           0.0,
                           tol,
                           false,
                           alice_best_response(profile.bob, posterior),
                           bob_best_response(profile.alice, BobSpace::kQuantum, posterior)};
  const BobResponse mixture = bob_best_response(profile.alice, BobSpace::kMixtureOnly, posterior);
  if (mixture.value > report.bob_best_dev.value) report.bob_best_dev = mixture;
  report.exploitability = std::max({0.0, report.bob_best_dev.value - report.value,
                                    report.value - report.alice_best_dev.value});
  report.is_nash = report.exploitability <= tol;
  return report;
}

// Evenly spaced points on [lo, hi], endpoints exact.
inline std::vector<double> Linspace(double lo, double hi, int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  out.back() = hi;
  return out;
}

struct PureScanCertificate {
  double step;
  int points_per_axis;
  double threshold;
  double min_exploitability;
  double argmin_alpha0;
  double argmin_alpha1;
  double argmin_eta;
  double argmin_value;
  double min_exploitability_stick;   // eta = 1 slice
  double min_exploitability_switch;  // eta = 0 slice
  long long violations;              // grid profiles below the threshold
  bool passed;
};

// Pure Bob strategies (eta in {0, 1}) against every grid pair of angles,
// checked for exploitability below `threshold`. Bob deviates over mixtures.
inline PureScanCertificate no_pure_equilibrium_scan(double grid_step, double threshold = 0.2) {
  if (!(grid_step > 0.0) || grid_step > kPi / 100.0 + 1e-15) {
    throw DomainError("no_pure_equilibrium_scan: grid step must lie in (0, pi/100]");
  }
  const int n = static_cast<int>(std::llround(kHalfPi / grid_step)) + 1;
  const auto angles = Linspace(0.0, kHalfPi, n);
  PureScanCertificate cert{grid_step, n, threshold, std::numeric_limits<double>::infinity(), 0, 0, 0, 0,
                           std::numeric_limits<double>::infinity(),
                           std::numeric_limits<double>::infinity(), 0, false};
  for (double eta : {0.0, 1.0}) {
    const BobStrategy bob = BobStrategy::MakeMix(eta);
    const double alice_best = alice_best_response(bob).value;
    double& slice_min = eta == 0.0 ? cert.min_exploitability_switch : cert.min_exploitability_stick;
    for (double a0 : angles) {
      for (double a1 : angles) {
        const AliceMeasurementStrategy alice(a0, a1);
        const double value = closed_form_win_probability(alice, eta);
        const double bob_best = bob_best_response(alice, BobSpace::kMixtureOnly).value;
        const double e = std::max({0.0, bob_best - value, value - alice_best});
        if (e < threshold) ++cert.violations;
        slice_min = std::min(slice_min, e);
        if (e < cert.min_exploitability) {
          cert.min_exploitability = e;
          cert.argmin_alpha0 = a0;
          cert.argmin_alpha1 = a1;
          cert.argmin_eta = eta;
          cert.argmin_value = value;
        }
      }
    }
  }
  cert.passed = cert.violations == 0;
  return cert;
}

struct SweepGrid {
  int alpha0_steps = 201;
  int alpha1_steps = 201;
  int decision_steps = 101;  // eta points on [0, 1], or beta points on [0, pi)
  bool quantum_bob = false;
};

struct SweepRow {
  double alpha0;
  double alpha1;
  std::optional<double> eta;
  std::optional<double> beta;
  double p_win;
  double gain;
};

// Rows ordered lexicographically by (alpha0, alpha1, decision) index.
inline std::vector<SweepRow> sweep_payoff(const SweepGrid& grid) {
  if (grid.alpha0_steps < 2 || grid.alpha1_steps < 2 || grid.decision_steps < 2) {
    throw DomainError("sweep_payoff: every axis needs at least 2 points");
  }
  const auto a0s = Linspace(0.0, kHalfPi, grid.alpha0_steps);
  const auto a1s = Linspace(0.0, kHalfPi, grid.alpha1_steps);
  std::vector<double> decisions;
  if (grid.quantum_bob) {
    for (int k = 0; k < grid.decision_steps; ++k) decisions.push_back(kPi * k / grid.decision_steps);
  } else {
    decisions = Linspace(0.0, 1.0, grid.decision_steps);
  }
  std::vector<SweepRow> rows;
  rows.reserve(a0s.size() * a1s.size() * decisions.size());
  for (double a0 : a0s) {
    for (double a1 : a1s) {
      const AliceMeasurementStrategy alice(a0, a1);
      for (double d : decisions) {
        const BobStrategy bob = grid.quantum_bob ? BobStrategy::MakeQuantum(d) : BobStrategy::MakeMix(d);
        const auto report = expected_payoff(alice, bob);
        SweepRow row{a0, a1, std::nullopt, std::nullopt, report.p_win, report.gain};
        if (grid.quantum_bob) {
          row.beta = d;
        } else {
          row.eta = d;
        }
        rows.push_back(row);
      }
    }
  }
  return rows;
}

inline constexpr const char* kSweepCsvHeader = "alpha0,alpha1,eta,beta,p_win,gain";

// Shortest text that round-trips the double.
inline std::string FormatDouble(double v) {
  char buf[32];
  for (int precision = 15; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

inline void WriteSweepCsv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << kSweepCsvHeader << '\n';
  for (const auto& r : rows) {
    out << FormatDouble(r.alpha0) << ',' << FormatDouble(r.alpha1) << ','
        << (r.eta ? FormatDouble(*r.eta) : "") << ',' << (r.beta ? FormatDouble(*r.beta) : "") << ','
        << FormatDouble(r.p_win) << ',' << FormatDouble(r.gain) << '\n';
  }
}

inline nlohmann::json SweepToJson(const std::vector<SweepRow>& rows) {
  auto arr = nlohmann::json::array();
  for (const auto& r : rows) {
    arr.push_back({{"alpha0", r.alpha0},
                   {"alpha1", r.alpha1},
                   {"eta", r.eta ? nlohmann::json(*r.eta) : nlohmann::json(nullptr)},
                   {"beta", r.beta ? nlohmann::json(*r.beta) : nlohmann::json(nullptr)},
                   {"p_win", r.p_win},
                   {"gain", r.gain}});
  }
  return arr;
}

inline nlohmann::json BobStrategyToJson(const BobStrategy& s) {
  return std::visit(
      [](const auto& v) -> nlohmann::json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, BobStrategy::Stick>) {
          return {{"type", "stick"}};
        } else if constexpr (std::is_same_v<T, BobStrategy::Switch>) {
          return {{"type", "switch"}};
        } else if constexpr (std::is_same_v<T, BobStrategy::Mix>) {
          return {{"type", "mix"}, {"eta", v.eta}};
        } else {
          return {{"type", "quantum"}, {"beta", v.beta}};
        }
      },
      s.variant());
}

inline nlohmann::json ReportToJson(const EquilibriumReport& r) {
  return {{"alpha0", r.profile.alice.alpha0()},
          {"alpha1", r.profile.alice.alpha1()},
          {"bob", BobStrategyToJson(r.profile.bob)},
          {"value", r.value},
          {"gain", r.gain()},
          {"exploitability", r.exploitability},
          {"tolerance", r.tolerance},
          {"is_nash", r.is_nash},
          {"alice_best_dev",
           {{"alpha0", r.alice_best_dev.strategy.alpha0()},
            {"alpha1", r.alice_best_dev.strategy.alpha1()},
            {"value", r.alice_best_dev.value}}},
          {"bob_best_dev", {{"strategy", BobStrategyToJson(r.bob_best_dev.strategy)}, {"value", r.bob_best_dev.value}}}};
}

}  // namespace qmonty
