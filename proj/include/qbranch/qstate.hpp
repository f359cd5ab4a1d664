// Copyright 2026 The qbranch Authors
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

#pragma once

#include <complex>

#include <Eigen/Dense>

#include "qbranch/error.hpp"

namespace qbranch {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;

/// Finite-dimensional Hilbert space C^dim. Projective space is CP^(dim-1).
class HilbertSpace {
 public:
  explicit HilbertSpace(int dim);
  int dim() const noexcept { return dim_; }
  bool operator==(const HilbertSpace&) const = default;

 private:
  int dim_;
};

/// A ray of the Hilbert space stored by a canonical unit representative.
///
/// The representative is normalized and its global phase is fixed so that
/// the first component of (numerically) largest modulus is real and
/// non-negative. Equal rays computed along the same path therefore compare
/// bitwise equal, which the hashed choice rules rely on.
class ProjectiveState {
 public:
  /// Normalizes and canonicalizes `v`. Throws DimensionError when
  /// dim < 2 and InvalidArgument for a zero or non-finite vector.
  explicit ProjectiveState(const Vector& v);

  static ProjectiveState basis(int dim, int k);

  const Vector& amplitudes() const noexcept { return amplitudes_; }
  int dim() const noexcept { return static_cast<int>(amplitudes_.size()); }
  HilbertSpace space() const { return HilbertSpace(dim()); }

  /// <this, other>, conjugate-linear in the first slot.
  Complex inner(const ProjectiveState& other) const;

 private:
  Vector amplitudes_;
};

/// Dense Hermitian matrix. Construction checks M = M^dagger within 1e-12
/// (relative to the largest entry) and stores the symmetrized part.
class HermitianMatrix {
 public:
  explicit HermitianMatrix(const Matrix& m);
  static HermitianMatrix zero(int dim);

  const Matrix& matrix() const noexcept { return m_; }
  int dim() const noexcept { return static_cast<int>(m_.rows()); }

 private:
  Matrix m_;
};

/// Dense unitary matrix. Construction checks U^dagger U = I within 1e-10.
class UnitaryMatrix {
 public:
  explicit UnitaryMatrix(const Matrix& m);
  static UnitaryMatrix identity(int dim);

  const Matrix& matrix() const noexcept { return m_; }
  int dim() const noexcept { return static_cast<int>(m_.rows()); }

  UnitaryMatrix adjoint() const;
  UnitaryMatrix operator*(const UnitaryMatrix& rhs) const;
  ProjectiveState operator*(const ProjectiveState& u) const;

 private:
  struct Unchecked {};
  UnitaryMatrix(const Matrix& m, Unchecked) : m_(m) {}
  Matrix m_;
};

/// Fubini-Study angle arccos|<a,b>| in [0, pi/2].
///
/// Evaluated as atan2(|b - <a,b>a|, |<a,b>|), which equals the arccos form
/// for unit vectors but stays accurate for nearly equal rays.
double fs_distance(const ProjectiveState& a, const ProjectiveState& b);

/// Same metric on raw unit vectors (no canonicalization, no checks beyond
/// matching size).
double fs_distance(const Vector& a, const Vector& b);

/// Caches the eigendecomposition H = Q diag(lambda) Q^dagger so that
/// exp(-i H dt) can be formed repeatedly at O(dim^3) without re-solving.
class Propagator {
 public:
  explicit Propagator(const HermitianMatrix& h);

  /// exp(-i H dt) for any real dt.
  Matrix at(double dt) const;
  const HermitianMatrix& hamiltonian() const noexcept { return h_; }

 private:
  HermitianMatrix h_;
  Matrix eigvecs_;
  Eigen::VectorXd eigvals_;
};

/// U(t1,t0) = exp(-i H (t1 - t0)). Requires t1 >= t0 (TimeOrderError).
UnitaryMatrix evolve(const HermitianMatrix& h, double t1, double t0);

/// Principal generator G with exp(-iG) = U: eigenphases arg(lambda) are
/// taken in (-pi, pi] and G has eigenvalues -arg(lambda). Throws
/// BranchAmbiguityError if some eigenphase lies within 1e-12 of -pi, where
/// the branch is not stable under rounding.
HermitianMatrix unitary_log(const UnitaryMatrix& u);

/// Largest singular value.
double operator_norm(const Matrix& m);

}  // namespace qbranch
