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

#include "qbranch/steering.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace qbranch {

namespace {

constexpr double kOrthogonalMargin = 1e-9;
constexpr double kZeroAngle = 1e-14;
constexpr double kWindowSlack = 1e-12;

// K = delta (|e><w| - |w><e|) and its closed-form exponential, where e is
// the unit vector of v orthogonal to w. This is the same operator as
// (arccos c / sqrt(1 - c^2)) (|v><w| - |w><v|) with c = <w,v>.
void rotation_generator(const Vector& w, const Vector& e, double delta, Matrix& k, Matrix& r) {
  const Eigen::Index d = w.size();
  const Matrix plane = e * w.adjoint() - w * e.adjoint();
  k = delta * plane;
  r = Matrix::Identity(d, d) + std::sin(delta) * plane +
      (std::cos(delta) - 1.0) * (w * w.adjoint() + e * e.adjoint());
}

}  // namespace

double hermitian_norm(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m, Eigen::EigenvaluesOnly);
  const auto& ev = solver.eigenvalues();
  return std::max(std::abs(ev[0]), std::abs(ev[ev.size() - 1]));
}

SteeringPlan synthesize_steering(const ProjectiveState& u, const HermitianMatrix& h, double tau0, double tau,
                                 double tau1, const ProjectiveState& v) {
  if (!(tau0 > 0.0 && tau0 <= tau && tau < tau1)) {
    throw TimeOrderError("need 0 < tau0 <= tau < tau1, got (" + std::to_string(tau0) + ", " + std::to_string(tau) +
                         ", " + std::to_string(tau1) + ")");
  }
  if (u.dim() != h.dim() || v.dim() != h.dim()) throw DimensionError("steering states and Hamiltonian dimensions differ");

  const Propagator prop(h);
  const Vector w = prop.at(tau1 - tau0) * u.amplitudes();
  const Complex overlap = w.dot(v.amplitudes());
  const double c = std::abs(overlap);
  const Vector aligned = c > 0.0 ? Vector(v.amplitudes() * (std::conj(overlap) / c)) : v.amplitudes();
  const Vector perp = aligned - c * w;
  const double s = perp.norm();
  const double delta = std::atan2(s, c);
  if (delta >= std::numbers::pi / 2 - kOrthogonalMargin) {
    throw NearOrthogonalError("target is " + std::to_string(delta) + " rad from the free image; need < pi/2");
  }

  const int d = h.dim();
  const Matrix window_free = prop.at(tau1 - tau);
  Matrix k = Matrix::Zero(d, d);
  Matrix r = Matrix::Identity(d, d);
  HermitianMatrix h_tilde = HermitianMatrix::zero(d);
  double angle = 0.0;
  if (delta > kZeroAngle) {
    angle = delta;
    rotation_generator(w, perp / s, delta, k, r);
    const UnitaryMatrix conjugated(window_free.adjoint() * r * window_free);
    const HermitianMatrix log = unitary_log(conjugated);
    h_tilde = HermitianMatrix(log.matrix() / (tau1 - tau));
  }

  SteeringPlan plan{
      .source = u,
      .target = v,
      .free_image = w,
      .aligned_target = aligned,
      .tau0 = tau0,
      .window_begin = tau,
      .window_end = tau1,
      .delta = angle,
      .generator = k,
      .rotation = r,
      .h_tilde = h_tilde,
      .closed_form_propagator = UnitaryMatrix(r * window_free),
      .cost = 0.0,
  };
  plan.cost = (tau1 - tau) * hermitian_norm(plan.h_tilde.matrix());
  return plan;
}

HermitianMatrix perturbation_at(const SteeringPlan& plan, const HermitianMatrix& h, double t) {
  if (t < plan.window_begin - kWindowSlack || t > plan.window_end + kWindowSlack) {
    throw WindowError("t = " + std::to_string(t) + " outside window [" + std::to_string(plan.window_begin) + ", " +
                      std::to_string(plan.window_end) + "]");
  }
  const Matrix u = Propagator(h).at(t - plan.window_begin);
  return HermitianMatrix(u * plan.h_tilde.matrix() * u.adjoint());
}

namespace {

struct WindowIntegration {
  Matrix propagator;
  double cost = 0.0;
};

WindowIntegration integrate(const SteeringPlan& plan, const HermitianMatrix& h, int steps) {
  if (steps < 1) throw InvalidArgument("integration needs at least one step");
  const Propagator prop(h);
  const Matrix& hm = h.matrix();
  const Matrix& ht = plan.h_tilde.matrix();
  const double step = plan.window_length() / steps;
  const int d = h.dim();
  const Complex minus_i(0.0, -1.0);

  // Full generator H + dH at offset s from the window start.
  auto generator = [&](double s, double* norm) {
    const Matrix u = prop.at(s);
    const Matrix dh = u * ht * u.adjoint();
    if (norm != nullptr) *norm = hermitian_norm(dh);
    return Matrix(hm + dh);
  };

  WindowIntegration out;
  Matrix v = Matrix::Identity(d, d);
  double norm_left = 0.0, norm_mid = 0.0, norm_right = 0.0;
  Matrix g_left = generator(0.0, &norm_left);
  for (int n = 0; n < steps; ++n) {
    const double s = n * step;
    const Matrix g_mid = generator(s + 0.5 * step, &norm_mid);
    const Matrix g_right = generator(s + step, &norm_right);
    const Matrix k1 = minus_i * (g_left * v);
    const Matrix k2 = minus_i * (g_mid * (v + 0.5 * step * k1));
    const Matrix k3 = minus_i * (g_mid * (v + 0.5 * step * k2));
    const Matrix k4 = minus_i * (g_right * (v + step * k3));
    v += (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    out.cost += (step / 6.0) * (norm_left + 4.0 * norm_mid + norm_right);
    g_left = g_right;
    norm_left = norm_right;
  }
  out.propagator = std::move(v);
  return out;
}

}  // namespace

Matrix integrate_window_propagator(const SteeringPlan& plan, const HermitianMatrix& h, int steps) {
  return integrate(plan, h, steps).propagator;
}

SteeringVerification verify_steering_by_integration(const SteeringPlan& plan, const HermitianMatrix& h, int steps) {
  if (steps < 100) throw InvalidArgument("verify_steering_by_integration needs steps >= 100");
  const WindowIntegration run = integrate(plan, h, steps);
  const Vector pre_window = Propagator(h).at(plan.window_begin - plan.tau0) * plan.source.amplitudes();
  const Vector achieved = run.propagator * pre_window;
  SteeringVerification out;
  out.steps = steps;
  out.fs_error = fs_distance(Vector(achieved / achieved.norm()), plan.target.amplitudes());
  out.propagator_error = operator_norm(run.propagator - plan.closed_form_propagator.matrix());
  out.integrated_cost = run.cost;
  return out;
}

}  // namespace qbranch
