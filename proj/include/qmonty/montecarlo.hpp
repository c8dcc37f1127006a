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

// Trajectory sampler for the game. It plays placement, reveals, Alice's
// measurement collapse and Bob's decision one trial at a time and never
// touches the closed-form payoff, so it can serve as an oracle for it.
//
// Trials are split into chunks; chunk k draws from SplitMix64::Stream(seed, k).
// The estimate depends only on (seed, trials, chunks), never on scheduling.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <future>
#include <optional>
#include <vector>

#include "qmonty/equilibrium.hpp"
#include "qmonty/errors.hpp"
#include "qmonty/game.hpp"
#include "qmonty/nstage.hpp"
#include "qmonty/quantum_core.hpp"
#include "qmonty/rng.hpp"

namespace qmonty {

inline constexpr int kDefaultChunks = 8;
inline constexpr double kSigmaBand = 5.0;

struct McEstimate {
  double p_hat;
  double std_error;  // sqrt(p_hat (1 - p_hat) / trials)
  std::int64_t trials;
  std::int64_t wins;
  std::uint64_t seed;
  int chunks;
};

// What to simulate. Without `nstage` the three-box game is played with the
// profile. With it, Bob follows `policy` through the pre-final stages; the
// last stage uses `profile` if given, else the policy's last decision against
// an Alice who does not disturb the particle.
struct McScenario {
  std::optional<NStageConfig> nstage;
  BobPolicy policy;
  bool profile_at_last_stage = true;
};

namespace mc_detail {

// Win probability of Bob's final decision for each post-measurement state,
// computed once per run through measure_projective.
struct FinalStageTable {
  // [location in frame][Alice outcome] -> probability of that outcome
  std::array<std::array<double, 2>, 2> alice_prob{};
  // [location][Alice outcome][final frame box] -> probability Bob finds the particle there
  std::array<std::array<std::array<double, 2>, 2>, 2> found_prob{};
  // [location][Alice outcome] -> win probability of a coherent decision
  std::array<std::array<double, 2>, 2> quantum_win{};
  bool quantum = false;
  double stick_weight = 0.0;
};

inline FinalStageTable BuildTable(const AliceMeasurementStrategy& alice, const BobStrategy& bob) {
  FinalStageTable t;
  t.quantum = bob.is_quantum();
  std::optional<MeasurementBasis> bob_basis;
  if (t.quantum) {
    const double beta = std::get<BobStrategy::Quantum>(bob.variant()).beta;
    CVector lose(2);
    lose << -std::sin(beta), std::cos(beta);
    bob_basis.emplace(std::vector<StateVector>{QuantumDecisionState(beta), StateVector::FromAmplitudes(lose)});
  } else {
    t.stick_weight = bob.stick_weight();
  }
  const auto computational = ComputationalBasis(2);
  for (int loc = 0; loc < 2; ++loc) {
    const double angle = loc == 0 ? alice.alpha0() : alice.alpha1();
    const auto outcomes = measure_projective(density_from_pure(basis_ket(2, loc)), ConditionalBasis(angle));
    for (int k = 0; k < 2; ++k) {
      t.alice_prob[loc][k] = outcomes[k].probability;
      const auto collapsed = density_from_pure(outcomes[k].state);
      if (t.quantum) {
        t.quantum_win[loc][k] = measure_projective(collapsed, *bob_basis)[0].probability;
      } else {
        const auto found = measure_projective(collapsed, computational);
        t.found_prob[loc][k] = {found[0].probability, found[1].probability};
      }
    }
  }
  return t;
}

struct Plan {
  int n_boxes;
  std::vector<StageDecision> pre_final;  // n_boxes - 3 decisions
  FinalStageTable last;
};

inline bool PlayOnce(const Plan& plan, SplitMix64& rng) {
  const int n = plan.n_boxes;
  const int particle = rng.Below(n);
  int held = rng.Below(n);
  std::uint32_t opened = 0;
  int scratch[32];
  for (int stage = 0; stage < n - 2; ++stage) {
    int count = 0;
    for (int b = 0; b < n; ++b) {
      if (b != particle && b != held && !(opened >> b & 1u)) scratch[count++] = b;
    }
    opened |= 1u << scratch[rng.Below(count)];
    if (stage < n - 3 && plan.pre_final[static_cast<std::size_t>(stage)] == StageDecision::kSwitch) {
      count = 0;
      for (int b = 0; b < n; ++b) {
        if (b != held && !(opened >> b & 1u)) scratch[count++] = b;
      }
      held = scratch[rng.Below(count)];
    }
  }
  const int loc = particle == held ? 0 : 1;
  const auto& t = plan.last;
  const int outcome = rng.Categorical(t.alice_prob[loc]);
  if (t.quantum) return rng.Bernoulli(t.quantum_win[loc][outcome]);
  const int final_box = rng.Bernoulli(t.stick_weight) ? 0 : 1;
  const int found = rng.Categorical(t.found_prob[loc][outcome]);
  return found == final_box;
}

}  // namespace mc_detail

inline McEstimate simulate(const StrategyProfile& profile, std::int64_t trials, std::uint64_t seed,
                           const McScenario& scenario = {}, int chunks = kDefaultChunks) {
  if (trials < 1) throw DomainError("simulate: trials must be >= 1");
  if (chunks < 1) throw DomainError("simulate: chunks must be >= 1");
  mc_detail::Plan plan;
  if (scenario.nstage) {
    const NStageConfig& cfg = *scenario.nstage;
    cfg.Validate();
    if (cfg.n_boxes > 30) throw ResourceLimitError("simulate: at most 30 boxes");
    if (cfg.reveal_tie_break != TieBreak::kUniform) {
      throw DomainError("simulate: only the uniform reveal tie-break is sampled");
    }
    if (static_cast<int>(scenario.policy.decisions.size()) != cfg.n_boxes - 2) {
      throw ShapeError("simulate: policy needs exactly n_boxes - 2 decisions");
    }
    plan.n_boxes = cfg.n_boxes;
    plan.pre_final.assign(scenario.policy.decisions.begin(), scenario.policy.decisions.end() - 1);
    if (scenario.profile_at_last_stage) {
      plan.last = mc_detail::BuildTable(profile.alice, profile.bob);
    } else {
      const BobStrategy last = scenario.policy.decisions.back() == StageDecision::kStick ? BobStrategy::MakeStick()
                                                                                         : BobStrategy::MakeSwitch();
      plan.last = mc_detail::BuildTable(AliceMeasurementStrategy::Honest(), last);
    }
  } else {
    plan.n_boxes = 3;
    plan.last = mc_detail::BuildTable(profile.alice, profile.bob);
  }

  const int used_chunks = static_cast<int>(std::min<std::int64_t>(chunks, trials));
  std::vector<std::future<std::int64_t>> futures;
  for (int c = 0; c < used_chunks; ++c) {
    const std::int64_t count = trials / used_chunks + (c < trials % used_chunks ? 1 : 0);
    futures.push_back(std::async(std::launch::async, [&plan, seed, c, count] {
      SplitMix64 rng = SplitMix64::Stream(seed, static_cast<std::uint64_t>(c));
      std::int64_t wins = 0;
      for (std::int64_t i = 0; i < count; ++i) wins += mc_detail::PlayOnce(plan, rng) ? 1 : 0;
      return wins;
    }));
  }
  std::int64_t wins = 0;
  for (auto& f : futures) wins += f.get();
  const double p = static_cast<double>(wins) / static_cast<double>(trials);
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(trials)), trials, wins, seed, chunks};
}

struct McComparison {
  McEstimate estimate;
  double p_exact;
  double z_score;
  bool pass;       // |p_hat - p_exact| <= 5 stderr
  bool low_power;  // band too wide to say much
};

inline McComparison compare_with_analytic(const StrategyProfile& profile, std::int64_t trials, std::uint64_t seed,
                                          int chunks = kDefaultChunks) {
  const McEstimate est = simulate(profile, trials, seed, {}, chunks);
  const double exact = expected_payoff(profile.alice, profile.bob).p_win;
  const double diff = est.p_hat - exact;
  double z = 0.0;
  if (est.std_error > 0.0) {
    z = diff / est.std_error;
  } else if (diff != 0.0) {
    z = std::copysign(std::numeric_limits<double>::infinity(), diff);
  }
  const bool pass = std::abs(diff) <= kSigmaBand * est.std_error;
  const bool low_power = trials < 100 || kSigmaBand * est.std_error > 0.05;
  return {est, exact, z, pass, low_power};
}

}  // namespace qmonty
