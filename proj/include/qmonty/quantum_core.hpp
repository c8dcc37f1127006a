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

// Finite-dimensional quantum state algebra: pure states, density operators,
// projective measurement, tensor products, partial trace and local unitaries
// on an auxiliary subsystem.
//
// Joint system/aux spaces use a row-major, system-major index convention:
// basis |i>|j> sits at index i * d_aux + j.
//
// There is deliberately no operation that applies a unitary to the system
// factor of a joint state. The game forbids evolving the playing particle
// once it has been placed; only measurement and aux-local operations exist.

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qmonty/errors.hpp"

namespace qmonty {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

// Algebraic identities (norms, Hermiticity, orthonormality).
inline constexpr double kAlgebraTol = 1e-12;
// Spectral checks (PSD, unitarity) and trace normalization.
inline constexpr double kSpectralTol = 1e-9;

class StateVector {
 public:
  // Takes amplitudes as given; they must already have unit norm.
  static StateVector FromAmplitudes(CVector amplitudes) {
    if (amplitudes.size() < 2) {
      throw ShapeError("state vector dimension must be >= 2");
    }
    if (std::abs(amplitudes.squaredNorm() - 1.0) > kAlgebraTol) {
      throw NormalizationError("state vector is not normalized");
    }
    return StateVector(std::move(amplitudes));
  }

  int dim() const { return static_cast<int>(amps_.size()); }
  Complex operator[](int i) const { return amps_[i]; }
  const CVector& amplitudes() const { return amps_; }

  // <this|other>
  Complex Inner(const StateVector& other) const {
    if (other.dim() != dim()) throw ShapeError("inner product dimension mismatch");
    return amps_.dot(other.amps_);
  }

  // Phase-insensitive equality: compares the projectors |psi><psi|.
  bool SameRay(const StateVector& other, double tol = kAlgebraTol) const {
    if (other.dim() != dim()) return false;
    const CMatrix a = amps_ * amps_.adjoint();
    const CMatrix b = other.amps_ * other.amps_.adjoint();
    return (a - b).cwiseAbs().maxCoeff() <= tol;
  }

 private:
  explicit StateVector(CVector amps) : amps_(std::move(amps)) {}
  CVector amps_;
};

class DensityMatrix {
 public:
  // Validates Hermiticity, unit trace and positive semidefiniteness.
  static DensityMatrix FromMatrix(CMatrix m) {
    DensityMatrix rho(std::move(m));
    rho.CheckInvariants();
    return rho;
  }

  static DensityMatrix Diagonal(std::span<const double> probabilities) {
    CMatrix m = CMatrix::Zero(static_cast<Eigen::Index>(probabilities.size()),
                              static_cast<Eigen::Index>(probabilities.size()));
    for (std::size_t i = 0; i < probabilities.size(); ++i) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = probabilities[i];
    }
    return FromMatrix(std::move(m));
  }
  static DensityMatrix Diagonal(std::initializer_list<double> probabilities) {
    return Diagonal(std::span<const double>(probabilities.begin(), probabilities.size()));
  }

  int dim() const { return static_cast<int>(m_.rows()); }
  Complex operator()(int i, int j) const { return m_(i, j); }
  const CMatrix& matrix() const { return m_; }
  double Trace() const { return m_.trace().real(); }

  double MinEigenvalue() const {
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(m_, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
  }
  double MaxEigenvalue() const {
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(m_, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().maxCoeff();
  }

  bool IsDiagonal(double tol = kAlgebraTol) const {
    for (int i = 0; i < dim(); ++i) {
      for (int j = 0; j < dim(); ++j) {
        if (i != j && std::abs(m_(i, j)) > tol) return false;
      }
    }
    return true;
  }

  void CheckInvariants() const {
    if (m_.rows() != m_.cols() || m_.rows() < 1) {
      throw ShapeError("density matrix must be square and non-empty");
    }
    if ((m_ - m_.adjoint()).cwiseAbs().maxCoeff() > kAlgebraTol) {
      throw InvalidStateError("density matrix is not Hermitian");
    }
    if (std::abs(m_.trace() - Complex(1.0)) > kSpectralTol) {
      throw NormalizationError("density matrix trace is not 1");
    }
    if (MinEigenvalue() < -kSpectralTol) {
      throw InvalidStateError("density matrix is not positive semidefinite");
    }
  }

 private:
  friend DensityMatrix density_from_pure(const StateVector& psi);
  explicit DensityMatrix(CMatrix m) : m_(std::move(m)) {}
  CMatrix m_;
};

class MeasurementBasis {
 public:
  // The vectors must be pairwise orthonormal. Fewer than `dim` vectors
  // measure a subspace.
  explicit MeasurementBasis(std::vector<StateVector> vectors) : vectors_(std::move(vectors)) {
    if (vectors_.empty()) throw InvalidBasisError("empty measurement basis");
    const int d = vectors_.front().dim();
    if (static_cast<int>(vectors_.size()) > d) {
      throw InvalidBasisError("more basis vectors than dimensions");
    }
    for (const auto& v : vectors_) {
      if (v.dim() != d) throw InvalidBasisError("basis vectors differ in dimension");
    }
    for (std::size_t i = 0; i < vectors_.size(); ++i) {
      for (std::size_t j = i; j < vectors_.size(); ++j) {
        const Complex overlap = vectors_[i].Inner(vectors_[j]);
        const double expected = i == j ? 1.0 : 0.0;
        if (std::abs(overlap - expected) > kAlgebraTol) {
          throw InvalidBasisError("measurement basis is not orthonormal");
        }
      }
    }
  }

  int dim() const { return vectors_.front().dim(); }
  int size() const { return static_cast<int>(vectors_.size()); }
  bool complete() const { return size() == dim(); }
  const StateVector& operator[](int i) const { return vectors_[static_cast<std::size_t>(i)]; }
  const std::vector<StateVector>& vectors() const { return vectors_; }

 private:
  std::vector<StateVector> vectors_;
};

struct MeasurementOutcome {
  double probability;
  StateVector state;
};

struct WeightedState {
  double weight;
  DensityMatrix rho;
};

enum class Subsystem { kSystem, kAux };

struct SubsystemDims {
  int system;
  int aux;
  int joint() const { return system * aux; }
};

inline StateVector basis_ket(int dim, int index) {
  if (dim < 2) throw DomainError("basis_ket: dimension must be >= 2");
  if (index < 0 || index >= dim) {
    throw DomainError("basis_ket: index " + std::to_string(index) + " outside [0, " +
                      std::to_string(dim) + ")");
  }
  CVector v = CVector::Zero(dim);
  v[index] = 1.0;
  return StateVector::FromAmplitudes(std::move(v));
}

// Normalizes an arbitrary nonzero coefficient vector.
inline StateVector superpose(std::span<const Complex> coeffs) {
  CVector v(static_cast<Eigen::Index>(coeffs.size()));
  for (std::size_t i = 0; i < coeffs.size(); ++i) v[static_cast<Eigen::Index>(i)] = coeffs[i];
  const double norm = v.norm();
  if (norm == 0.0) throw DegenerateStateError("superpose: all coefficients are zero");
  return StateVector::FromAmplitudes(v / norm);
}
inline StateVector superpose(std::initializer_list<Complex> coeffs) {
  return superpose(std::span<const Complex>(coeffs.begin(), coeffs.size()));
}

// |psi><psi|. PSD and unit trace hold by construction for a normalized psi.
inline DensityMatrix density_from_pure(const StateVector& psi) {
  return DensityMatrix(psi.amplitudes() * psi.amplitudes().adjoint());
}

inline DensityMatrix mix(std::span<const WeightedState> parts) {
  if (parts.empty()) throw NormalizationError("mix: no components");
  const int d = parts.front().rho.dim();
  double total = 0.0;
  CMatrix acc = CMatrix::Zero(d, d);
  for (const auto& part : parts) {
    if (part.rho.dim() != d) throw ShapeError("mix: component dimensions differ");
    if (part.weight < 0.0) throw NormalizationError("mix: negative weight");
    total += part.weight;
    acc += part.weight * part.rho.matrix();
  }
  if (std::abs(total - 1.0) > kSpectralTol) {
    throw NormalizationError("mix: weights sum to " + std::to_string(total));
  }
  return DensityMatrix::FromMatrix(std::move(acc));
}
inline DensityMatrix mix(std::initializer_list<WeightedState> parts) {
  return mix(std::span<const WeightedState>(parts.begin(), parts.size()));
}

// Outcome i has probability <v_i|rho|v_i> and leaves the state in v_i.
inline std::vector<MeasurementOutcome> measure_projective(const DensityMatrix& rho,
                                                          const MeasurementBasis& basis) {
  if (basis.dim() != rho.dim()) throw ShapeError("measure_projective: basis/state dimension mismatch");
  std::vector<MeasurementOutcome> outcomes;
  outcomes.reserve(static_cast<std::size_t>(basis.size()));
  for (const auto& v : basis.vectors()) {
    const Complex p = v.amplitudes().dot(rho.matrix() * v.amplitudes());
    outcomes.push_back({p.real(), v});
  }
  return outcomes;
}

inline StateVector tensor(const StateVector& a, const StateVector& b) {
  CVector out(a.dim() * b.dim());
  for (int i = 0; i < a.dim(); ++i) {
    for (int j = 0; j < b.dim(); ++j) out[i * b.dim() + j] = a[i] * b[j];
  }
  return StateVector::FromAmplitudes(std::move(out));
}

inline DensityMatrix partial_trace(const DensityMatrix& rho, SubsystemDims dims, Subsystem keep) {
  if (dims.system < 1 || dims.aux < 1 || rho.dim() != dims.joint()) {
    throw ShapeError("partial_trace: state dimension " + std::to_string(rho.dim()) +
                     " does not factor as " + std::to_string(dims.system) + "x" +
                     std::to_string(dims.aux));
  }
  const CMatrix& m = rho.matrix();
  const int ds = dims.system;
  const int da = dims.aux;
  if (keep == Subsystem::kSystem) {
    CMatrix out = CMatrix::Zero(ds, ds);
    for (int i = 0; i < ds; ++i)
      for (int k = 0; k < ds; ++k)
        for (int j = 0; j < da; ++j) out(i, k) += m(i * da + j, k * da + j);
    return DensityMatrix::FromMatrix(std::move(out));
  }
  CMatrix out = CMatrix::Zero(da, da);
  for (int j = 0; j < da; ++j)
    for (int l = 0; l < da; ++l)
      for (int i = 0; i < ds; ++i) out(j, l) += m(i * da + j, i * da + l);
  return DensityMatrix::FromMatrix(std::move(out));
}

// (I (x) U) rho (I (x) U)^dagger.
inline DensityMatrix apply_local_unitary_aux(const DensityMatrix& rho_joint, const CMatrix& u,
                                             SubsystemDims dims) {
  if (rho_joint.dim() != dims.joint()) throw ShapeError("apply_local_unitary_aux: joint dimension mismatch");
  if (u.rows() != dims.aux || u.cols() != dims.aux) {
    throw ShapeError("apply_local_unitary_aux: operator is not d_aux x d_aux");
  }
  const CMatrix identity = CMatrix::Identity(dims.aux, dims.aux);
  if ((u.adjoint() * u - identity).cwiseAbs().maxCoeff() > kSpectralTol) {
    throw InvalidOperatorError("apply_local_unitary_aux: operator is not unitary");
  }
  CMatrix full = CMatrix::Zero(dims.joint(), dims.joint());
  for (int i = 0; i < dims.system; ++i) {
    full.block(i * dims.aux, i * dims.aux, dims.aux, dims.aux) = u;
  }
  CMatrix out = full * rho_joint.matrix() * full.adjoint();
  out = (0.5 * (out + out.adjoint())).eval();
  return DensityMatrix::FromMatrix(std::move(out));
}

}  // namespace qmonty
