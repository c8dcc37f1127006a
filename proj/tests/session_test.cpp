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

#include "qmonty/session.hpp"

#include <cmath>
#include <set>

#include <gtest/gtest.h>

namespace qmonty {
namespace {

TEST(Session, PickAdvancesPhase) {
  auto s = GameSession::CreateUniform(3, 1);
  EXPECT_EQ(s.phase(), Phase::kPlaced);
  s = session_step(s, PickAction{1});
  EXPECT_EQ(s.phase(), Phase::kPicked);
  EXPECT_EQ(s.pick(), 1);
}

TEST(Session, RevealNeverOpensPickOrParticle) {
  std::set<int> seen;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    auto s = GameSession::Create(3, ClassicalPlacement{0}, seed);
    s = session_step(s, PickAction{0});
    s = session_step(s, RevealAction{});
    ASSERT_EQ(s.revealed().size(), 1u);
    const int r = s.revealed().front();
    EXPECT_TRUE(r == 1 || r == 2);
    seen.insert(r);
  }
  EXPECT_EQ(seen, (std::set<int>{1, 2}));

  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    auto s = GameSession::Create(3, ClassicalPlacement{2}, seed);
    s = session_step(s, PickAction{0});
    s = session_step(s, RevealAction{});
    EXPECT_EQ(s.revealed().front(), 1);
  }
}

TEST(Session, OutOfPhaseActionsAreProtocolViolations) {
  auto s = GameSession::CreateUniform(3, 2);
  EXPECT_THROW(session_step(s, RevealAction{}), ProtocolViolation);
  EXPECT_THROW(session_step(s, DecideAction{BobStrategy::MakeStick()}), ProtocolViolation);
  EXPECT_THROW(session_step(s, ResolveAction{}), ProtocolViolation);
  EXPECT_THROW(session_step(s, MeasureAction{AliceMeasurementStrategy::Nash()}), ProtocolViolation);
  s = session_step(s, PickAction{0});
  EXPECT_THROW(session_step(s, PickAction{1}), ProtocolViolation);
  s = session_step(s, RevealAction{});
  s = session_step(s, MeasureAction{AliceMeasurementStrategy::Nash()});
  EXPECT_THROW(session_step(s, MeasureAction{AliceMeasurementStrategy::Nash()}), ProtocolViolation);
  s = session_step(s, DecideAction{BobStrategy::MakeSwitch()});
  EXPECT_THROW(session_step(s, DecideAction{BobStrategy::MakeSwitch()}), ProtocolViolation);
  s = session_step(s, ResolveAction{});
  EXPECT_EQ(s.phase(), Phase::kResolved);
  EXPECT_TRUE(s.outcome().has_value());
  EXPECT_THROW(session_step(s, ResolveAction{}), ProtocolViolation);
}

TEST(Session, PickOutOfRange) {
  auto s = GameSession::CreateUniform(3, 3);
  EXPECT_THROW(session_step(s, PickAction{3}), DomainError);
  EXPECT_THROW(session_step(s, PickAction{-1}), DomainError);
}

TEST(Session, CreateValidatesPlacement) {
  EXPECT_THROW(GameSession::Create(3, ClassicalPlacement{3}, 0), DomainError);
  EXPECT_THROW(GameSession::Create(3, UniformSuperposition(4), 0), ShapeError);
}

TEST(Session, HonestAliceClassicalOutcomesAreDeterministic) {
  auto stick = AutoPlay(GameSession::Create(3, ClassicalPlacement{1}, 5), 1, AliceMeasurementStrategy::Honest(),
                        BobStrategy::MakeStick());
  EXPECT_EQ(stick.outcome(), true);
  auto sw = AutoPlay(GameSession::Create(3, ClassicalPlacement{1}, 5), 0, AliceMeasurementStrategy::Honest(),
                     BobStrategy::MakeSwitch());
  EXPECT_EQ(sw.outcome(), true);
  EXPECT_EQ(sw.final_box(), 1);
}

TEST(Session, SameSeedSameTranscript) {
  auto a = AutoPlay(GameSession::CreateUniform(3, 99), 0, AliceMeasurementStrategy::Nash(), BobStrategy::MakeMix(0.5));
  auto b = AutoPlay(GameSession::CreateUniform(3, 99), 0, AliceMeasurementStrategy::Nash(), BobStrategy::MakeMix(0.5));
  EXPECT_EQ(a.transcript(), b.transcript());
  EXPECT_EQ(a.outcome(), b.outcome());
}

TEST(Session, QuantumDecisionOnlyAtLastStage) {
  auto s = GameSession::CreateUniform(5, 4);
  s = session_step(s, PickAction{0});
  s = session_step(s, RevealAction{});
  EXPECT_FALSE(s.IsFinalStage());
  EXPECT_THROW(session_step(s, DecideAction{BobStrategy::MakeQuantum(0.4)}), ProtocolViolation);
  EXPECT_THROW(session_step(s, MeasureAction{AliceMeasurementStrategy::Nash()}), ProtocolViolation);
  s = session_step(s, DecideAction{BobStrategy::MakeStick()});
  EXPECT_EQ(s.phase(), Phase::kPicked);
  EXPECT_EQ(s.pick(), 0);
}

TEST(Session, NStageRoundReachesTwoBoxes) {
  auto s = AutoPlay(GameSession::CreateUniform(6, 8), 2, AliceMeasurementStrategy::Nash(), BobStrategy::MakeSwitch());
  EXPECT_EQ(s.revealed().size(), 4u);
  EXPECT_EQ(s.phase(), Phase::kResolved);
}

TEST(Session, EntangledPlacementPlays) {
  auto s = AutoPlay(GameSession::Create(3, MaximallyEntangled(3), 12), 0, AliceMeasurementStrategy::Honest(),
                    BobStrategy::MakeStick());
  ASSERT_TRUE(s.alice_location().has_value());
  EXPECT_EQ(s.outcome(), *s.alice_location() == 0);
}

// Auto-play at the equilibrium profile wins half the time.
TEST(Session, NashAutoPlayWinRate) {
  constexpr int kRounds = 1000000;
  long long wins = 0;
  for (int i = 0; i < kRounds; ++i) {
    auto s = AutoPlay(GameSession::CreateUniform(3, Mix64(static_cast<std::uint64_t>(i))), i % 3,
                      AliceMeasurementStrategy::Nash(), BobStrategy::MakeMix(0.5));
    wins += *s.outcome() ? 1 : 0;
  }
  const double p = static_cast<double>(wins) / kRounds;
  const double se = std::sqrt(0.25 / kRounds);
  EXPECT_LE(std::abs(p - 0.5), 5 * se) << p;
}

TEST(Session, ClassicalAutoPlayWinRates) {
  constexpr int kRounds = 60000;
  long long stick = 0, sw = 0;
  for (int i = 0; i < kRounds; ++i) {
    stick += *AutoPlay(GameSession::CreateUniform(3, 2 * i), 0, AliceMeasurementStrategy::Honest(),
                       BobStrategy::MakeStick())
                  .outcome();
    sw += *AutoPlay(GameSession::CreateUniform(3, 2 * i + 1), 0, AliceMeasurementStrategy::Honest(),
                    BobStrategy::MakeSwitch())
               .outcome();
  }
  const double se = std::sqrt(2.0 / 9.0 / kRounds);
  EXPECT_LE(std::abs(static_cast<double>(stick) / kRounds - 1.0 / 3.0), 5 * se);
  EXPECT_LE(std::abs(static_cast<double>(sw) / kRounds - 2.0 / 3.0), 5 * se);
}

}  // namespace
}  // namespace qmonty
