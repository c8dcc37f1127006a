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

// Prints the classical baselines, the fair equilibrium, and one Monte Carlo
// check of it.

#include <cstdio>

#include "qmonty/equilibrium.hpp"
#include "qmonty/game.hpp"
#include "qmonty/montecarlo.hpp"

int main() {
  using namespace qmonty;
  const auto honest = AliceMeasurementStrategy::Honest();
  std::printf("honest Alice, Bob sticks:   %.6f\n", expected_payoff(honest, BobStrategy::MakeStick()).p_win);
  std::printf("honest Alice, Bob switches: %.6f\n", expected_payoff(honest, BobStrategy::MakeSwitch()).p_win);

  const auto report = verify_nash(StrategyProfile::Nash(), 1e-9);
  std::printf("equilibrium value %.6f, gain %.6f, exploitability %.3g, nash=%s\n", report.value, report.gain(),
              report.exploitability, report.is_nash ? "yes" : "no");

  const auto mc = compare_with_analytic(StrategyProfile::Nash(), 200000, 7);
  std::printf("monte carlo %.5f +/- %.5f (exact %.5f, z=%.2f)\n", mc.estimate.p_hat, mc.estimate.std_error,
              mc.p_exact, mc.z_score);
  return 0;
}
