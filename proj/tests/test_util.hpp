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

// Random test inputs. Test-only; not part of the library.

#pragma once

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "qmonty/quantum_core.hpp"

namespace qmonty::testing {

inline CMatrix RandomGaussian(int rows, int cols, std::mt19937_64& gen) {
  std::normal_distribution<double> n(0.0, 1.0);
  CMatrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = Complex(n(gen), n(gen));
  return m;
}

// Haar-ish unitary from the QR of a complex Gaussian matrix.
inline CMatrix RandomUnitary(int d, std::mt19937_64& gen) {
  Eigen::HouseholderQR<CMatrix> qr(RandomGaussian(d, d, gen));
  return qr.householderQ() * CMatrix::Identity(d, d);
}

inline StateVector RandomPure(int d, std::mt19937_64& gen) {
  CVector v = RandomGaussian(d, 1, gen).col(0);
  return StateVector::FromAmplitudes(v / v.norm());
}

// A A^dagger / tr, full rank with probability 1.
inline DensityMatrix RandomMixed(int d, std::mt19937_64& gen) {
  const CMatrix a = RandomGaussian(d, d, gen);
  CMatrix rho = a * a.adjoint();
  rho /= rho.trace().real();
  rho = (0.5 * (rho + rho.adjoint())).eval();
  return DensityMatrix::FromMatrix(rho);
}

// Independent construction of the state Bob faces, straight from the
// measurement vectors: the particle at Bob's box lands on phi0 with weight
// |<phi0|0>|^2 = cos^2 a0, on phi0_perp with sin^2 a0; at the other box on
// phi1 with |<phi1|1>|^2 = sin^2 a1, on phi1_perp with cos^2 a1.
inline CMatrix RhoPrimeOracle(double a0, double a1, double w0, double w1) {
  Eigen::Vector2d phi0(std::cos(a0), std::sin(a0)), phi0p(-std::sin(a0), std::cos(a0));
  Eigen::Vector2d phi1(std::cos(a1), std::sin(a1)), phi1p(-std::sin(a1), std::cos(a1));
  const Eigen::Vector2d e0(1, 0), e1(0, 1);
  auto sq = [](double x) { return x * x; };
  Eigen::Matrix2d rho = w0 * (sq(phi0.dot(e0)) * phi0 * phi0.transpose() + sq(phi0p.dot(e0)) * phi0p * phi0p.transpose()) +
                        w1 * (sq(phi1.dot(e1)) * phi1 * phi1.transpose() + sq(phi1p.dot(e1)) * phi1p * phi1p.transpose());
  return rho.cast<Complex>();
}

// Bob's mixture win probability read off the oracle state.
inline double MixturePayoffOracle(double a0, double a1, double eta, double w0 = 1.0 / 3.0, double w1 = 2.0 / 3.0) {
  const CMatrix rho = RhoPrimeOracle(a0, a1, w0, w1);
  return eta * rho(0, 0).real() + (1.0 - eta) * rho(1, 1).real();
}

inline double MaxAbsDiff(const CMatrix& a, const CMatrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace qmonty::testing
