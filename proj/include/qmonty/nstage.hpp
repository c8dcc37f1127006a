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

// The N-box, N-stage game. Bob picks a box; Alice then opens one empty,
// unpicked box per stage and Bob sticks or switches, until two boxes remain
// and Bob's last decision settles the game. That is n - 2 reveal/decide
// stages.
//
// Classical values are exact: the game tree is expanded over particle
// location, Alice's reveals and Bob's switch targets with rational
// arithmetic.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include "json.hpp"

#include "qmonty/equilibrium.hpp"
#include "qmonty/errors.hpp"
#include "qmonty/game.hpp"

namespace qmonty {

using Rational = boost::multiprecision::cpp_rational;

inline constexpr int kBruteForceLimit = 8;

struct NStageConfig {
  int n_boxes = 3;
  TieBreak reveal_tie_break = TieBreak::kUniform;

  void Validate() const {
    if (n_boxes < 3) throw DomainError("N-stage game needs at least 3 boxes");
  }
};

enum class StageDecision : std::uint8_t { kStick, kSwitch };

// One decision per stage; a switch moves to a uniformly random box among the
// unopened, unheld ones.
struct BobPolicy {
  std::vector<StageDecision> decisions;

  static BobPolicy StickThenSwitch(int n_boxes) {
    BobPolicy p{std::vector<StageDecision>(static_cast<std::size_t>(n_boxes - 2), StageDecision::kStick)};
    p.decisions.back() = StageDecision::kSwitch;
    return p;
  }
  static BobPolicy AlwaysStick(int n_boxes) {
    return {std::vector<StageDecision>(static_cast<std::size_t>(n_boxes - 2), StageDecision::kStick)};
  }

  std::vector<std::string> Names() const {
    std::vector<std::string> out;
    for (auto d : decisions) out.push_back(d == StageDecision::kStick ? "stick" : "switch");
    return out;
  }

  std::string ToString() const {
    std::string s;
    for (std::size_t i = 0; i < decisions.size(); ++i) {
      if (i) s += ',';
      s += decisions[i] == StageDecision::kStick ? "stick" : "switch";
    }
    return s;
  }

  bool operator==(const BobPolicy&) const = default;
};

inline std::string RationalString(const Rational& r) {
  return boost::multiprecision::numerator(r).str() + "/" + boost::multiprecision::denominator(r).str();
}

namespace nstage_detail {

class TreeEvaluator {
 public:
  TreeEvaluator(const BobPolicy& policy, const NStageConfig& config)
      : policy_(policy), n_(config.n_boxes), adversarial_(config.reveal_tie_break == TieBreak::kAdversarial) {}

  Rational Value() {
    Rational total = 0;
    for (int particle = 0; particle < n_; ++particle) total += Node(0, 0, particle);
    return total / n_;
  }

 private:
  // Value with `opened` boxes revealed, Bob holding `held`, particle at `particle`.
  Rational Node(std::uint32_t opened, int held, int particle) {
    const int stage = __builtin_popcount(opened);
    if (stage == n_ - 2) return held == particle ? Rational(1) : Rational(0);
    const std::uint64_t key = (std::uint64_t{opened} << 16) | (std::uint64_t(held) << 8) | std::uint64_t(particle);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;

    Rational acc = 0;
    Rational best;
    int choices = 0;
    for (int r = 0; r < n_; ++r) {
      if (r == particle || r == held || (opened >> r & 1u)) continue;
      const std::uint32_t next = opened | (1u << r);
      Rational v;
      if (policy_.decisions[static_cast<std::size_t>(stage)] == StageDecision::kStick) {
        v = Node(next, held, particle);
      } else {
        int targets = 0;
        Rational sum = 0;
        for (int t = 0; t < n_; ++t) {
          if (t == held || (next >> t & 1u)) continue;
          sum += Node(next, t, particle);
          ++targets;
        }
        v = sum / targets;
      }
      if (choices == 0 || v < best) best = v;
      acc += v;
      ++choices;
    }
    const Rational value = adversarial_ ? best : acc / choices;
    memo_.emplace(key, value);
    return value;
  }

  const BobPolicy& policy_;
  int n_;
  bool adversarial_;
  std::unordered_map<std::uint64_t, Rational> memo_;
};

}  // namespace nstage_detail

// Exact win probability of `policy` under uniform placement. With the
// adversarial tie-break Alice picks each reveal to minimize Bob's value.
inline Rational classical_value(const BobPolicy& policy, const NStageConfig& config) {
  config.Validate();
  if (config.n_boxes > kBruteForceLimit) {
    throw ResourceLimitError("classical_value: n_boxes " + std::to_string(config.n_boxes) +
                             " exceeds the brute-force limit " + std::to_string(kBruteForceLimit));
  }
  if (static_cast<int>(policy.decisions.size()) != config.n_boxes - 2) {
    throw ShapeError("classical_value: policy needs exactly n_boxes - 2 decisions");
  }
  return nstage_detail::TreeEvaluator(policy, config).Value();
}

struct PolicyValue {
  BobPolicy policy;
  Rational value;
};

// Enumerates all 2^(n-2) policies; ties go to the lexicographically smallest
// (stick < switch).
inline PolicyValue optimal_classical_policy(const NStageConfig& config) {
  config.Validate();
  if (config.n_boxes > kBruteForceLimit) {
    throw ResourceLimitError("optimal_classical_policy: n_boxes exceeds the brute-force limit");
  }
  const int stages = config.n_boxes - 2;
  std::optional<PolicyValue> best;
  for (std::uint32_t mask = 0; mask < (1u << stages); ++mask) {
    BobPolicy policy;
    // Most significant bit is stage 1, so increasing masks are lexicographic.
    for (int s = 0; s < stages; ++s) {
      policy.decisions.push_back((mask >> (stages - 1 - s)) & 1u ? StageDecision::kSwitch : StageDecision::kStick);
    }
    Rational v = classical_value(policy, config);
    if (!best || v > best->value) best = PolicyValue{std::move(policy), std::move(v)};
  }
  return *best;
}

// Sticking through every pre-final reveal keeps Bob's box at 1/n.
inline RevealPosterior LastStagePosterior(int n_boxes) {
  return {1.0 / n_boxes, (n_boxes - 1.0) / n_boxes};
}

// Alice holds off measuring until two boxes remain, then uses the 45-degree
// bases; Bob sticks until then and plays S(1/2) at the last choice.
// Deviations range over Bob's last-stage decisions (mixtures and coherent)
// and Alice's last-stage angles.
inline EquilibriumReport quantum_nstage_equilibrium(const NStageConfig& config, double tol) {
  config.Validate();
  return verify_nash(StrategyProfile::Nash(), tol, LastStagePosterior(config.n_boxes));
}

inline nlohmann::json NStageReportJson(const NStageConfig& config, const PolicyValue& pv) {
  return {{"n", config.n_boxes},
          {"policy", pv.policy.Names()},
          {"exact_value", RationalString(pv.value)},
          {"float_value", pv.value.convert_to<double>()},
          {"tie_break", ToString(config.reveal_tie_break)}};
}

}  // namespace qmonty
