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

#include "qbranch/qstate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace qbranch {

namespace {

constexpr double kHermitianTol = 1e-12;
constexpr double kUnitaryTol = 1e-10;
constexpr double kBranchTol = 1e-12;

double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw DimensionError(std::string(what) + " must be a non-empty square matrix, got " +
                         std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

double clean_zero(double x) { return x == 0.0 ? 0.0 : x; }

}  // namespace

HilbertSpace::HilbertSpace(int dim) : dim_(dim) {
  if (dim < 2) throw DimensionError("Hilbert space dimension must be >= 2, got " + std::to_string(dim));
}

ProjectiveState::ProjectiveState(const Vector& v) {
  if (v.size() < 2) throw DimensionError("state dimension must be >= 2, got " + std::to_string(v.size()));
  const double norm = v.norm();
  if (!std::isfinite(norm) || norm < 1e-300) throw InvalidArgument("state vector is zero or non-finite");
  amplitudes_ = v / norm;

  double largest = 0.0;
  for (Eigen::Index i = 0; i < amplitudes_.size(); ++i) largest = std::max(largest, std::abs(amplitudes_[i]));
  // Near-ties in modulus resolve to the first index so that rays carried
  // along slightly different paths still pick the same pivot.
  Eigen::Index pivot = 0;
  for (Eigen::Index i = 0; i < amplitudes_.size(); ++i) {
    if (std::abs(amplitudes_[i]) >= largest * (1.0 - 1e-9)) {
      pivot = i;
      break;
    }
  }
  const Complex z = amplitudes_[pivot];
  amplitudes_ *= std::conj(z) / std::abs(z);
  // The pivot modulus comes from the remaining components, so rays such as
  // basis states get bit-exact representatives however they were produced.
  double rest = 0.0;
  for (Eigen::Index i = 0; i < amplitudes_.size(); ++i)
    if (i != pivot) rest += std::norm(amplitudes_[i]);
  amplitudes_[pivot] = Complex(std::sqrt(std::max(0.0, 1.0 - rest)), 0.0);
  for (Eigen::Index i = 0; i < amplitudes_.size(); ++i) {
    amplitudes_[i] = Complex(clean_zero(amplitudes_[i].real()), clean_zero(amplitudes_[i].imag()));
  }
}

ProjectiveState ProjectiveState::basis(int dim, int k) {
  if (k < 0 || k >= dim) throw InvalidArgument("basis index " + std::to_string(k) + " out of range");
  Vector v = Vector::Zero(dim);
  v[k] = 1.0;
  return ProjectiveState(v);
}

Complex ProjectiveState::inner(const ProjectiveState& other) const {
  if (other.dim() != dim()) throw DimensionError("inner product of states with different dimensions");
  return amplitudes_.dot(other.amplitudes_);
}

HermitianMatrix::HermitianMatrix(const Matrix& m) {
  require_square(m, "Hermitian matrix");
  if (!m.allFinite()) throw HermiticityError("matrix has non-finite entries");
  const double scale = std::max(1.0, max_abs(m));
  const double defect = max_abs(m - m.adjoint());
  if (defect > kHermitianTol * scale) {
    throw HermiticityError("matrix is not Hermitian (max |M - M^dagger| = " + std::to_string(defect) + ")");
  }
  m_ = 0.5 * (m + m.adjoint());
}

HermitianMatrix HermitianMatrix::zero(int dim) { return HermitianMatrix(Matrix::Zero(dim, dim)); }

UnitaryMatrix::UnitaryMatrix(const Matrix& m) : m_(m) {
  require_square(m, "unitary matrix");
  const double defect = max_abs(m.adjoint() * m - Matrix::Identity(m.rows(), m.cols()));
  if (!(defect <= kUnitaryTol)) {
    throw UnitarityError("matrix is not unitary (max |U^dagger U - I| = " + std::to_string(defect) + ")");
  }
}

UnitaryMatrix UnitaryMatrix::identity(int dim) { return UnitaryMatrix(Matrix::Identity(dim, dim)); }

UnitaryMatrix UnitaryMatrix::adjoint() const { return UnitaryMatrix(m_.adjoint(), Unchecked{}); }

UnitaryMatrix UnitaryMatrix::operator*(const UnitaryMatrix& rhs) const {
  if (rhs.dim() != dim()) throw DimensionError("unitary product with mismatched dimensions");
  return UnitaryMatrix(m_ * rhs.m_, Unchecked{});
}

ProjectiveState UnitaryMatrix::operator*(const ProjectiveState& u) const {
  if (u.dim() != dim()) throw DimensionError("unitary of dim " + std::to_string(dim()) +
                                             " applied to state of dim " + std::to_string(u.dim()));
  return ProjectiveState(m_ * u.amplitudes());
}

double fs_distance(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) {
    throw DimensionError("fs_distance between dimensions " + std::to_string(a.size()) + " and " +
                         std::to_string(b.size()));
  }
  const Complex overlap = a.dot(b);
  const double perp = (b - overlap * a).norm();
  return std::atan2(perp, std::abs(overlap));
}

double fs_distance(const ProjectiveState& a, const ProjectiveState& b) {
  return fs_distance(a.amplitudes(), b.amplitudes());
}

Propagator::Propagator(const HermitianMatrix& h) : h_(h) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h.matrix());
  if (solver.info() != Eigen::Success) throw HermiticityError("eigendecomposition failed");
  eigvecs_ = solver.eigenvectors();
  eigvals_ = solver.eigenvalues();
}

Matrix Propagator::at(double dt) const {
  Vector phases(eigvals_.size());
  for (Eigen::Index i = 0; i < eigvals_.size(); ++i) phases[i] = std::polar(1.0, -eigvals_[i] * dt);
  return eigvecs_ * phases.asDiagonal() * eigvecs_.adjoint();
}

UnitaryMatrix evolve(const HermitianMatrix& h, double t1, double t0) {
  if (!(t1 >= t0)) throw TimeOrderError("evolve requires t1 >= t0");
  if (t1 == t0) return UnitaryMatrix::identity(h.dim());
  return UnitaryMatrix(Propagator(h).at(t1 - t0));
}

HermitianMatrix unitary_log(const UnitaryMatrix& u) {
  // The Schur form of a normal matrix is diagonal up to rounding, and the
  // Schur vectors are orthonormal even for degenerate spectra.
  Eigen::ComplexSchur<Matrix> schur(u.matrix());
  if (schur.info() != Eigen::Success) throw UnitarityError("Schur decomposition failed");
  const Matrix& q = schur.matrixU();
  const Matrix& t = schur.matrixT();
  Eigen::VectorXd generator(t.rows());
  for (Eigen::Index i = 0; i < t.rows(); ++i) {
    const double phase = std::arg(t(i, i));
    if (std::numbers::pi - std::abs(phase) < kBranchTol) {
      throw BranchAmbiguityError("eigenphase within 1e-12 of -pi; perturb the input");
    }
    generator[i] = -phase;
  }
  return HermitianMatrix(q * generator.cast<Complex>().asDiagonal() * q.adjoint());
}

double operator_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()[0];
}

}  // namespace qbranch
