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

// The three-box quantum Monty Hall game.
//
// Analysis works in a canonical two-dimensional frame after the reveal:
// index 0 is the box Bob holds, index 1 the single surviving alternative.
// Alice knows where the particle is and measures it in a basis chosen by that
// location (angle alpha0 when it sits in Bob's box, alpha1 otherwise). Bob
// then sticks, switches, mixes the two, or makes a coherent R(beta) decision.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "qmonty/errors.hpp"
#include "qmonty/quantum_core.hpp"

namespace qmonty {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kHalfPi = std::numbers::pi / 2.0;
inline constexpr double kQuarterPi = std::numbers::pi / 4.0;

// Angles a hair outside the closed range (grid rounding) are clamped.
inline constexpr double kAngleSlack = 1e-12;

class AliceMeasurementStrategy {
 public:
  AliceMeasurementStrategy(double alpha0, double alpha1)
      : alpha0_(CheckAngle(alpha0, "alpha0")), alpha1_(CheckAngle(alpha1, "alpha1")) {}

  // Both bases at 45 degrees: the fair-game measurement.
  static AliceMeasurementStrategy Nash() { return {kQuarterPi, kQuarterPi}; }
  // Measuring in the location eigenbasis disturbs nothing.
  static AliceMeasurementStrategy Honest() { return {0.0, 0.0}; }

  double alpha0() const { return alpha0_; }
  double alpha1() const { return alpha1_; }

  bool operator==(const AliceMeasurementStrategy&) const = default;

 private:
  static double CheckAngle(double a, const char* name) {
    if (!(a >= -kAngleSlack && a <= kHalfPi + kAngleSlack)) {
      throw DomainError(std::string(name) + " must lie in [0, pi/2], got " + std::to_string(a));
    }
    return std::clamp(a, 0.0, kHalfPi);
  }

  double alpha0_;
  double alpha1_;
};

class BobStrategy {
 public:
  struct Stick {
    bool operator==(const Stick&) const = default;
  };
  struct Switch {
    bool operator==(const Switch&) const = default;
  };
  struct Mix {
    double eta;  // probability of sticking
    bool operator==(const Mix&) const = default;
  };
  struct Quantum {
    double beta;  // canonical, in [0, pi)
    bool operator==(const Quantum&) const = default;
  };
  using Variant = std::variant<Stick, Switch, Mix, Quantum>;

  static BobStrategy MakeStick() { return BobStrategy(Stick{}); }
  static BobStrategy MakeSwitch() { return BobStrategy(Switch{}); }
  static BobStrategy MakeMix(double eta) {
    if (!(eta >= 0.0 && eta <= 1.0)) {
      throw DomainError("mixture weight eta must lie in [0, 1], got " + std::to_string(eta));
    }
    return BobStrategy(Mix{eta});
  }
  // R(beta + pi) = R(beta), so beta is reduced into [0, pi).
  static BobStrategy MakeQuantum(double beta) {
    if (!std::isfinite(beta)) throw DomainError("beta must be finite");
    double b = std::fmod(beta, kPi);
    if (b < 0.0) b += kPi;
    if (b >= kPi) b = 0.0;
    return BobStrategy(Quantum{b});
  }

  const Variant& variant() const { return v_; }
  bool is_quantum() const { return std::holds_alternative<Quantum>(v_); }

  // Stick probability for the classical variants; Stick = Mix(1), Switch = Mix(0).
  double stick_weight() const {
    if (std::holds_alternative<Stick>(v_)) return 1.0;
    if (std::holds_alternative<Switch>(v_)) return 0.0;
    if (const auto* m = std::get_if<Mix>(&v_)) return m->eta;
    throw PreconditionError("quantum decision has no classical stick weight");
  }

  std::string Describe() const {
    return std::visit(
        [](const auto& s) -> std::string {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, Stick>) {
            return "stick";
          } else if constexpr (std::is_same_v<T, Switch>) {
            return "switch";
          } else if constexpr (std::is_same_v<T, Mix>) {
            return "mix(" + std::to_string(s.eta) + ")";
          } else {
            return "quantum(" + std::to_string(s.beta) + ")";
          }
        },
        v_);
  }

  bool operator==(const BobStrategy&) const = default;

 private:
  explicit BobStrategy(Variant v) : v_(v) {}
  Variant v_;
};

struct ClassicalPlacement {
  int box;
};
struct SuperposedPlacement {
  StateVector state;
};
// Playing particle entangled with an auxiliary particle; system-major joint state.
struct EntangledPlacement {
  StateVector joint;
  SubsystemDims dims;
};
using Placement = std::variant<ClassicalPlacement, SuperposedPlacement, EntangledPlacement>;

// Uniform superposition over the boxes.
inline SuperposedPlacement UniformSuperposition(int n_boxes) {
  std::vector<Complex> coeffs(static_cast<std::size_t>(n_boxes), Complex(1.0));
  return {superpose(coeffs)};
}

// (1/sqrt(n)) sum_i |i>|i>_aux.
inline EntangledPlacement MaximallyEntangled(int n_boxes) {
  CVector amps = CVector::Zero(n_boxes * n_boxes);
  for (int i = 0; i < n_boxes; ++i) amps[i * n_boxes + i] = 1.0 / std::sqrt(double(n_boxes));
  return {StateVector::FromAmplitudes(std::move(amps)), {n_boxes, n_boxes}};
}

inline MeasurementBasis ComputationalBasis(int dim) {
  std::vector<StateVector> kets;
  for (int i = 0; i < dim; ++i) kets.push_back(basis_ket(dim, i));
  return MeasurementBasis(std::move(kets));
}

inline int PlacementBoxes(const Placement& placement) {
  return std::visit(
      [](const auto& p) -> int {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, ClassicalPlacement>) {
          return -1;
        } else if constexpr (std::is_same_v<T, SuperposedPlacement>) {
          return p.state.dim();
        } else {
          return p.dims.system;
        }
      },
      placement);
}

// Location distribution seen by a computational-basis measurement of the
// playing particle. Entangled placements are reduced over the aux first.
inline std::vector<double> LocationDistribution(const Placement& placement, int n_boxes) {
  DensityMatrix rho = std::visit(
      [n_boxes](const auto& p) -> DensityMatrix {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, ClassicalPlacement>) {
          return density_from_pure(basis_ket(n_boxes, p.box));
        } else if constexpr (std::is_same_v<T, SuperposedPlacement>) {
          return density_from_pure(p.state);
        } else {
          return partial_trace(density_from_pure(p.joint), p.dims, Subsystem::kSystem);
        }
      },
      placement);
  if (rho.dim() != n_boxes) throw ShapeError("placement dimension does not match box count");
  std::vector<double> dist;
  for (const auto& outcome : measure_projective(rho, ComputationalBasis(n_boxes))) {
    dist.push_back(outcome.probability);
  }
  return dist;
}

enum class TieBreak { kUniform, kAdversarial };

inline const char* ToString(TieBreak t) { return t == TieBreak::kUniform ? "uniform" : "adversarial"; }

// Bayesian state of the particle over (pick, remaining) after Alice opens an
// empty box. `prior` is the computational-basis location distribution over
// the three boxes.
//
// Tie-break governs the reveal when the particle is in Bob's box and both
// other boxes are empty: uniform opens each with probability 1/2; adversarial
// always opens the box that was observed, the least informative host rule.
inline DensityMatrix post_reveal_state(std::span<const double> prior, int pick, int revealed,
                                       TieBreak tie_break = TieBreak::kUniform) {
  if (prior.size() != 3) throw ShapeError("post_reveal_state: the reveal game has three boxes");
  if (pick < 0 || pick >= 3) throw DomainError("post_reveal_state: pick out of range");
  if (revealed < 0 || revealed >= 3) throw DomainError("post_reveal_state: revealed box out of range");
  if (pick == revealed) throw PreconditionError("post_reveal_state: Alice cannot open Bob's box");
  const int other = 3 - pick - revealed;
  const double reveal_given_pick = tie_break == TieBreak::kUniform ? 0.5 : 1.0;
  const double joint_pick = prior[static_cast<std::size_t>(pick)] * reveal_given_pick;
  const double joint_other = prior[static_cast<std::size_t>(other)];
  const double evidence = joint_pick + joint_other;
  if (evidence <= 0.0) {
    throw ProtocolViolation("post_reveal_state: revealed box " + std::to_string(revealed) +
                            " holds the particle");
  }
  return DensityMatrix::Diagonal({joint_pick / evidence, joint_other / evidence});
}

inline DensityMatrix post_reveal_state(const Placement& placement, int pick, int revealed,
                                       TieBreak tie_break = TieBreak::kUniform) {
  const auto prior = LocationDistribution(placement, 3);
  return post_reveal_state(prior, pick, revealed, tie_break);
}

// {cos a |0> + sin a |1>, -sin a |0> + cos a |1>}
inline MeasurementBasis ConditionalBasis(double alpha) {
  const double c = std::cos(alpha);
  const double s = std::sin(alpha);
  CVector phi(2), phi_perp(2);
  phi << c, s;
  phi_perp << -s, c;
  return MeasurementBasis({StateVector::FromAmplitudes(phi), StateVector::FromAmplitudes(phi_perp)});
}

// Alice measures the located particle: in the alpha0 basis if it is in Bob's
// box, in the alpha1 basis if it is in the other one. The result is the
// outcome-averaged state.
inline DensityMatrix alice_post_measurement_state(const DensityMatrix& rho_post_reveal,
                                                  const AliceMeasurementStrategy& strat) {
  if (rho_post_reveal.dim() != 2) throw ShapeError("alice_post_measurement_state: expects the 2-box frame");
  if (!rho_post_reveal.IsDiagonal()) {
    throw PreconditionError(
        "alice_post_measurement_state: state must be diagonal in the location basis; "
        "coherent placements are measured before the reveal");
  }
  const std::array<double, 2> weight = {rho_post_reveal(0, 0).real(), rho_post_reveal(1, 1).real()};
  const std::array<double, 2> angle = {strat.alpha0(), strat.alpha1()};
  std::vector<WeightedState> parts;
  for (int loc = 0; loc < 2; ++loc) {
    if (weight[loc] == 0.0) continue;
    const auto located = density_from_pure(basis_ket(2, loc));
    for (auto& outcome : measure_projective(located, ConditionalBasis(angle[loc]))) {
      parts.push_back({weight[loc] * outcome.probability, density_from_pure(outcome.state)});
    }
  }
  return mix(parts);
}

// cos(beta)|0> + sin(beta)|1>
inline StateVector QuantumDecisionState(double beta) {
  CVector v(2);
  v << std::cos(beta), std::sin(beta);
  return StateVector::FromAmplitudes(std::move(v));
}

inline double bob_win_probability(const DensityMatrix& rho, const BobStrategy& strat) {
  if (rho.dim() != 2) throw ShapeError("bob_win_probability: expects the 2-box frame");
  if (const auto* q = std::get_if<BobStrategy::Quantum>(&strat.variant())) {
    const CVector psi = QuantumDecisionState(q->beta).amplitudes();
    return psi.dot(rho.matrix() * psi).real();
  }
  const double eta = strat.stick_weight();
  return eta * rho(0, 0).real() + (1.0 - eta) * rho(1, 1).real();
}

// Posterior weight of (Bob's box, the surviving box) after the reveals.
struct RevealPosterior {
  double stay;
  double other;
};
inline constexpr RevealPosterior kThreeBoxPosterior{1.0 / 3.0, 2.0 / 3.0};

// Closed-form win probability for a classical mixture S(eta):
//   stay  * [eta (c0^4 + s0^4) + 2 (1 - eta) s0^2 c0^2]
// + other * [(1 - eta)(c1^4 + s1^4) + 2 eta s1^2 c1^2]
inline double closed_form_win_probability(const AliceMeasurementStrategy& alice, double eta,
                                          RevealPosterior posterior = kThreeBoxPosterior) {
  const double c0 = std::cos(alice.alpha0()), s0 = std::sin(alice.alpha0());
  const double c1 = std::cos(alice.alpha1()), s1 = std::sin(alice.alpha1());
  const double c0s = c0 * c0, s0s = s0 * s0, c1s = c1 * c1, s1s = s1 * s1;
  return posterior.stay * (eta * (c0s * c0s + s0s * s0s) + 2.0 * (1.0 - eta) * s0s * c0s) +
         posterior.other * ((1.0 - eta) * (c1s * c1s + s1s * s1s) + 2.0 * eta * s1s * c1s);
}

// State Bob faces: post-reveal posterior, then Alice's conditional measurement.
inline DensityMatrix BobFacingState(const AliceMeasurementStrategy& alice,
                                    RevealPosterior posterior = kThreeBoxPosterior) {
  return alice_post_measurement_state(DensityMatrix::Diagonal({posterior.stay, posterior.other}), alice);
}

// Full measurement pipeline from a uniformly placed particle: Bob picks 0,
// Alice opens box 2, measures, Bob decides.
inline double pipeline_win_probability(const AliceMeasurementStrategy& alice, const BobStrategy& bob) {
  static const std::array<double, 3> kUniform = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  const auto rho = post_reveal_state(kUniform, 0, 2, TieBreak::kUniform);
  return bob_win_probability(alice_post_measurement_state(rho, alice), bob);
}

enum class PayoffMethod { kAnalytic, kMonteCarlo };

inline const char* ToString(PayoffMethod m) {
  return m == PayoffMethod::kAnalytic ? "analytic" : "monte-carlo";
}

struct PayoffReport {
  double p_win;
  double gain;  // 2 p_win - 1; Alice's gain is -gain
  PayoffMethod method;
  double std_error;  // 0 for analytic reports

  static PayoffReport Analytic(double p) { return {p, 2.0 * p - 1.0, PayoffMethod::kAnalytic, 0.0}; }
  double alice_gain() const { return -gain; }
};

// Mixtures use the closed form; coherent decisions go through the pipeline.
inline PayoffReport expected_payoff(const AliceMeasurementStrategy& alice, const BobStrategy& bob,
                                    RevealPosterior posterior = kThreeBoxPosterior) {
  if (bob.is_quantum()) {
    return PayoffReport::Analytic(bob_win_probability(BobFacingState(alice, posterior), bob));
  }
  return PayoffReport::Analytic(closed_form_win_probability(alice, bob.stick_weight(), posterior));
}

}  // namespace qmonty
