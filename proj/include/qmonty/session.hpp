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

// One playthrough of the game as an explicit state machine.
//
//   Placed --pick--> Picked --reveal--> Revealed --decide--> Decided --resolve--> Resolved
//                      ^                   |
//                      +-----decide--------+   (N-box games, while more than two boxes remain)
//
// `measure` is Alice's conditional measurement. It is legal once, in
// Revealed, when exactly two boxes remain. Every random draw comes from the
// session's own generator, so a session is a plain value and replays
// identically from its seed.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qmonty/errors.hpp"
#include "qmonty/game.hpp"
#include "qmonty/quantum_core.hpp"
#include "qmonty/rng.hpp"

namespace qmonty {

enum class Phase { kPlaced, kPicked, kRevealed, kDecided, kResolved };

inline const char* ToString(Phase p) {
  switch (p) {
    case Phase::kPlaced: return "placed";
    case Phase::kPicked: return "picked";
    case Phase::kRevealed: return "revealed";
    case Phase::kDecided: return "decided";
    case Phase::kResolved: return "resolved";
  }
  return "?";
}

struct PickAction {
  int box;
};
struct RevealAction {};
struct MeasureAction {
  AliceMeasurementStrategy strategy;
};
struct DecideAction {
  BobStrategy strategy;
};
struct ResolveAction {};
using SessionAction = std::variant<PickAction, RevealAction, MeasureAction, DecideAction, ResolveAction>;

class GameSession;
GameSession session_step(GameSession session, const SessionAction& action);

class GameSession {
 public:
  static GameSession Create(int n_boxes, Placement placement, std::uint64_t seed) {
    if (n_boxes < 3) throw DomainError("a game needs at least 3 boxes");
    GameSession s(n_boxes, std::move(placement), seed);
    if (const auto* c = std::get_if<ClassicalPlacement>(&s.placement_)) {
      if (c->box < 0 || c->box >= n_boxes) throw DomainError("placement box out of range");
      s.location_ = c->box;
    } else if (PlacementBoxes(s.placement_) != n_boxes) {
      throw ShapeError("placement dimension does not match box count");
    }
    return s;
  }

  // Alice places the particle uniformly at random with the session's generator.
  static GameSession CreateUniform(int n_boxes, std::uint64_t seed) {
    if (n_boxes < 3) throw DomainError("a game needs at least 3 boxes");
    SplitMix64 rng(seed);
    const int box = rng.Below(n_boxes);
    auto s = Create(n_boxes, ClassicalPlacement{box}, seed);
    s.rng_ = rng;
    return s;
  }

  int n_boxes() const { return n_boxes_; }
  Phase phase() const { return phase_; }
  std::uint64_t seed() const { return seed_; }
  int pick() const { return pick_; }
  const std::vector<int>& revealed() const { return revealed_; }
  const Placement& placement() const { return placement_; }
  const std::vector<std::string>& transcript() const { return transcript_; }
  std::optional<bool> outcome() const { return outcome_; }
  bool measured() const { return measured_state_.has_value(); }
  const std::optional<BobStrategy>& final_decision() const { return final_decision_; }
  // Box Bob ends on for classical decisions; nullopt for coherent ones.
  std::optional<int> final_box() const { return final_box_; }
  // Computational-basis location found at resolution (classical decisions).
  std::optional<int> final_location() const { return final_location_; }

  // Alice-side knowledge; never part of Bob's view before resolution.
  std::optional<int> alice_location() const {
    return location_ >= 0 ? std::optional<int>(location_) : std::nullopt;
  }

  std::vector<int> Unrevealed() const {
    std::vector<int> out;
    for (int b = 0; b < n_boxes_; ++b) {
      if (!IsRevealed(b)) out.push_back(b);
    }
    return out;
  }

  bool IsRevealed(int box) const {
    for (int r : revealed_) {
      if (r == box) return true;
    }
    return false;
  }

  // The surviving non-picked box once two boxes remain.
  int OtherBox() const {
    for (int b : Unrevealed()) {
      if (b != pick_) return b;
    }
    return -1;
  }

  bool IsFinalStage() const { return static_cast<int>(Unrevealed().size()) == 2; }

 private:
  friend GameSession session_step(GameSession session, const SessionAction& action);

  GameSession(int n_boxes, Placement placement, std::uint64_t seed)
      : n_boxes_(n_boxes), placement_(std::move(placement)), seed_(seed), rng_(seed) {}

  void RequirePhase(Phase expected, const char* action) const {
    if (phase_ != expected) {
      throw ProtocolViolation(std::string(action) + " is not legal in phase '" + ToString(phase_) +
                              "' (expected '" + ToString(expected) + "')");
    }
  }

  void DoPick(int box) {
    RequirePhase(Phase::kPlaced, "pick");
    if (box < 0 || box >= n_boxes_) throw DomainError("pick: box out of range");
    pick_ = box;
    phase_ = Phase::kPicked;
    transcript_.push_back("pick " + std::to_string(box));
  }

  void DoReveal() {
    RequirePhase(Phase::kPicked, "reveal");
    if (location_ < 0) {
      // Coherent placement: Alice locates the particle in the computational basis first.
      const auto dist = LocationDistribution(placement_, n_boxes_);
      location_ = rng_.Categorical(dist);
      transcript_.push_back("locate");
    }
    std::vector<int> eligible;
    for (int b : Unrevealed()) {
      if (b != pick_ && b != location_) eligible.push_back(b);
    }
    if (eligible.empty()) throw ProtocolViolation("reveal: no empty box left to open");
    const int box = eligible[static_cast<std::size_t>(rng_.Below(static_cast<int>(eligible.size())))];
    if (box == location_) throw Error("reveal: internal invariant failure, opened box is occupied");
    revealed_.push_back(box);
    phase_ = Phase::kRevealed;
    transcript_.push_back("reveal " + std::to_string(box));
  }

  void DoMeasure(const AliceMeasurementStrategy& strat) {
    RequirePhase(Phase::kRevealed, "measure");
    if (!IsFinalStage()) throw ProtocolViolation("measure: Alice measures only when two boxes remain");
    if (measured()) throw ProtocolViolation("measure: Alice has already measured");
    const int frame_location = location_ == pick_ ? 0 : 1;
    const double angle = frame_location == 0 ? strat.alpha0() : strat.alpha1();
    const auto outcomes =
        measure_projective(density_from_pure(basis_ket(2, frame_location)), ConditionalBasis(angle));
    const std::array<double, 2> probs = {outcomes[0].probability, outcomes[1].probability};
    measured_state_ = outcomes[static_cast<std::size_t>(rng_.Categorical(probs))].state;
    transcript_.push_back("measure " + std::to_string(strat.alpha0()) + " " + std::to_string(strat.alpha1()));
  }

  void DoDecide(const BobStrategy& strat) {
    RequirePhase(Phase::kRevealed, "decide");
    transcript_.push_back("decide " + strat.Describe());
    if (!IsFinalStage()) {
      if (strat.is_quantum()) {
        throw ProtocolViolation("decide: coherent decisions are only available at the last stage");
      }
      if (!rng_.Bernoulli(strat.stick_weight())) {
        std::vector<int> targets;
        for (int b : Unrevealed()) {
          if (b != pick_) targets.push_back(b);
        }
        pick_ = targets[static_cast<std::size_t>(rng_.Below(static_cast<int>(targets.size())))];
      }
      phase_ = Phase::kPicked;
      return;
    }
    final_decision_ = strat;
    if (!strat.is_quantum()) {
      final_box_ = rng_.Bernoulli(strat.stick_weight()) ? pick_ : OtherBox();
    }
    phase_ = Phase::kDecided;
  }

  void DoResolve() {
    RequirePhase(Phase::kDecided, "resolve");
    const int frame_location = location_ == pick_ ? 0 : 1;
    const StateVector state = measured_state_.value_or(basis_ket(2, frame_location));
    const auto rho = density_from_pure(state);
    if (const auto* q = std::get_if<BobStrategy::Quantum>(&final_decision_->variant())) {
      const double c = std::cos(q->beta), s = std::sin(q->beta);
      CVector win(2), lose(2);
      win << c, s;
      lose << -s, c;
      const MeasurementBasis basis({StateVector::FromAmplitudes(win), StateVector::FromAmplitudes(lose)});
      const auto outcomes = measure_projective(rho, basis);
      const std::array<double, 2> probs = {outcomes[0].probability, outcomes[1].probability};
      outcome_ = rng_.Categorical(probs) == 0;
    } else {
      const auto outcomes = measure_projective(rho, ComputationalBasis(2));
      const std::array<double, 2> probs = {outcomes[0].probability, outcomes[1].probability};
      final_location_ = rng_.Categorical(probs) == 0 ? pick_ : OtherBox();
      outcome_ = *final_location_ == *final_box_;
    }
    phase_ = Phase::kResolved;
    transcript_.push_back(*outcome_ ? "resolve win" : "resolve lose");
  }

  int n_boxes_;
  Placement placement_;
  std::uint64_t seed_;
  SplitMix64 rng_;
  Phase phase_ = Phase::kPlaced;
  int location_ = -1;
  int pick_ = -1;
  std::vector<int> revealed_;
  std::optional<StateVector> measured_state_;  // frame (pick, other)
  std::optional<BobStrategy> final_decision_;
  std::optional<int> final_box_;
  std::optional<int> final_location_;
  std::optional<bool> outcome_;
  std::vector<std::string> transcript_;
};

inline GameSession session_step(GameSession session, const SessionAction& action) {
  std::visit(
      [&session](const auto& a) {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, PickAction>) {
          session.DoPick(a.box);
        } else if constexpr (std::is_same_v<T, RevealAction>) {
          session.DoReveal();
        } else if constexpr (std::is_same_v<T, MeasureAction>) {
          session.DoMeasure(a.strategy);
        } else if constexpr (std::is_same_v<T, DecideAction>) {
          session.DoDecide(a.strategy);
        } else {
          session.DoResolve();
        }
      },
      action);
  return session;
}

// Drives a round end to end: Bob sticks through any intermediate stages,
// Alice measures once two boxes remain, then Bob's final decision resolves.
inline GameSession AutoPlay(GameSession session, int pick, const AliceMeasurementStrategy& alice,
                            const BobStrategy& bob) {
  session = session_step(std::move(session), PickAction{pick});
  while (true) {
    session = session_step(std::move(session), RevealAction{});
    if (session.IsFinalStage()) break;
    session = session_step(std::move(session), DecideAction{BobStrategy::MakeStick()});
  }
  session = session_step(std::move(session), MeasureAction{alice});
  session = session_step(std::move(session), DecideAction{bob});
  return session_step(std::move(session), ResolveAction{});
}

}  // namespace qmonty
