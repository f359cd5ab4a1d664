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

#include "qbranch/sampling.hpp"

#include <cmath>
#include <numbers>

namespace qbranch {

double StateSampler::uniform() {
  // 53 random mantissa bits in [0, 1).
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double StateSampler::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

Complex StateSampler::complex_normal() {
  const double re = normal();
  const double im = normal();
  return {re, im};
}

ProjectiveState StateSampler::state(int dim) {
  Vector v(dim);
  for (int i = 0; i < dim; ++i) v[i] = complex_normal();
  return ProjectiveState(v);
}

UnitaryMatrix StateSampler::unitary(int dim) {
  Matrix g(dim, dim);
  for (int j = 0; j < dim; ++j)
    for (int i = 0; i < dim; ++i) g(i, j) = complex_normal();
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR();
  // Fix the column phases so the distribution is Haar rather than QR-biased.
  for (int j = 0; j < dim; ++j) {
    const Complex d = r(j, j);
    const double mod = std::abs(d);
    if (mod > 0.0) q.col(j) *= d / mod;
  }
  return UnitaryMatrix(q);
}

HermitianMatrix StateSampler::hermitian(int dim, double scale) {
  Matrix g(dim, dim);
  for (int j = 0; j < dim; ++j)
    for (int i = 0; i < dim; ++i) g(i, j) = complex_normal();
  return HermitianMatrix(0.5 * scale * (g + g.adjoint()));
}

}  // namespace qbranch
