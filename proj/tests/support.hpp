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

// Generators and reference computations shared by the tests. Nothing here
// calls into the library's own linear-algebra helpers.
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace qtest {

using C = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;

inline constexpr double kPi = 3.14159265358979323846;

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  C cnormal() { return {normal(), normal()}; }

  Vec vector(int d) {
    Vec v(d);
    for (int i = 0; i < d; ++i) v[i] = cnormal();
    return v / v.norm();
  }

  Mat hermitian(int d, double scale = 1.0) {
    Mat a(d, d);
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) a(r, c) = cnormal();
    return scale * 0.5 * (a + a.adjoint());
  }

  // Gram-Schmidt on Gaussian columns.
  Mat unitary(int d) {
    Mat q(d, d);
    for (int c = 0; c < d; ++c) {
      Vec v(d);
      for (int i = 0; i < d; ++i) v[i] = cnormal();
      for (int k = 0; k < c; ++k) v -= q.col(k).dot(v) * q.col(k);
      q.col(c) = v / v.norm();
    }
    return q;
  }

  // Unit vector at FS angle `delta` from `w`.
  Vec at_angle(const Vec& w, double delta) {
    Vec e = vector(static_cast<int>(w.size()));
    e -= w.dot(e) * w;
    e /= e.norm();
    const C phase = std::polar(1.0, uniform(0.0, 2 * kPi));
    return phase * (std::cos(delta) * w + std::sin(delta) * e);
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

/// FS angle from the chord between b, rephased onto a, and a:
/// |a - b'| = 2 sin(theta / 2). Normalizes both inputs.
inline double fs_angle(const Vec& a, const Vec& b) {
  const Vec u = a / a.norm();
  Vec v = b / b.norm();
  const C c = u.dot(v);
  if (std::abs(c) > 0) v *= std::conj(c) / std::abs(c);
  return 2 * std::asin(std::min(1.0, (u - v).norm() / 2));
}

/// exp(M) by scaling and squaring of a truncated Taylor series.
inline Mat expm_series(const Mat& m) {
  const double norm = m.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  double s = 1.0;
  while (norm * s > 0.05) {
    s *= 0.5;
    ++squarings;
  }
  const Mat a = m * s;
  Mat term = Mat::Identity(m.rows(), m.cols());
  Mat sum = term;
  for (int k = 1; k <= 20; ++k) {
    term = term * a / static_cast<double>(k);
    sum += term;
  }
  for (int i = 0; i < squarings; ++i) sum = sum * sum;
  return sum;
}

/// exp(-i H t) for a 2x2 Hermitian H via the Pauli decomposition.
inline Mat expm_qubit(const Mat& h, double t) {
  const double b = 0.5 * (h(0, 0) + h(1, 1)).real();
  const double ax = h(0, 1).real(), ay = -h(0, 1).imag(), az = 0.5 * (h(0, 0) - h(1, 1)).real();
  const double a = std::sqrt(ax * ax + ay * ay + az * az);
  Mat out = Mat::Identity(2, 2) * std::cos(a * t);
  if (a > 0) {
    Mat n(2, 2);
    n << az, C(ax, -ay), C(ax, ay), -az;
    out -= C(0, 1) * std::sin(a * t) / a * n;
  }
  return std::polar(1.0, -b * t) * out;
}

/// Largest singular value by power iteration on M^dagger M.
inline double spectral_norm_power(const Mat& m, int iters = 500) {
  const Mat g = m.adjoint() * m;
  Vec v = Vec::Ones(m.cols()) / std::sqrt(static_cast<double>(m.cols()));
  for (int i = 0; i < m.cols(); ++i) v[i] += C(0.01 * (i + 1), 0.003 * i);
  v /= v.norm();
  double lambda = 0.0;
  for (int k = 0; k < iters; ++k) {
    Vec w = g * v;
    const double n = w.norm();
    if (n == 0.0) return 0.0;
    lambda = n;
    v = w / n;
  }
  return std::sqrt(lambda);
}

/// Max over ordered entries of |a - b|.
inline double max_abs_diff(const Mat& a, const Mat& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace qtest
