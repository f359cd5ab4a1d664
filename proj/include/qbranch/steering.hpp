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

#include <vector>

#include "qbranch/qstate.hpp"

namespace qbranch {

/// Minimal-energy steering of U(tau1,tau0)u onto a nearby ray v.
///
/// The perturbation lives on the window [tau, tau1] and is the conjugated
/// rank-2 rotation generator dH(t) = U(t,tau) H_tilde U(t,tau)^dagger. Its
/// propagator over the window is V(tau1,tau) = e^K U(tau1,tau), and its
/// integrated operator-norm cost equals the FS angle delta.
struct SteeringPlan {
  ProjectiveState source;  // u, the state at tau0
  ProjectiveState target;  // v
  Vector free_image;       // w = U(tau1,tau0) u
  Vector aligned_target;   // v rephased so that <w,v> >= 0
  double tau0 = 0.0;
  double window_begin = 0.0;  // tau
  double window_end = 0.0;    // tau1
  double delta = 0.0;
  Matrix generator;                      // K, skew-Hermitian, rank <= 2
  Matrix rotation;                       // R = e^K
  HermitianMatrix h_tilde;               // (i/dtau) log(U(tau1,tau)^dagger R U(tau1,tau))
  UnitaryMatrix closed_form_propagator;  // R U(tau1,tau)
  double cost = 0.0;                     // dtau * ||H_tilde||

  double window_length() const noexcept { return window_end - window_begin; }
};

/// Requires 0 < tau0 <= tau < tau1 (TimeOrderError) and
/// d_FS(U(tau1,tau0)u, v) < pi/2 - 1e-9 (NearOrthogonalError).
SteeringPlan synthesize_steering(const ProjectiveState& u, const HermitianMatrix& h, double tau0, double tau,
                                 double tau1, const ProjectiveState& v);

/// dH(t) for t in [tau, tau1]; WindowError outside.
HermitianMatrix perturbation_at(const SteeringPlan& plan, const HermitianMatrix& h, double t);

/// Numerical V(tau1,tau) from classical RK4 on i dV/dt = (H + dH(t)) V with
/// `steps` uniform steps.
Matrix integrate_window_propagator(const SteeringPlan& plan, const HermitianMatrix& h, int steps);

struct SteeringVerification {
  int steps = 0;
  double fs_error = 0.0;          // d_FS(V_num U(tau,tau0) u, v)
  double propagator_error = 0.0;  // ||V_num - closed form||
  double integrated_cost = 0.0;   // Simpson quadrature of ||dH(t)|| on the RK4 grid
};

/// Requires steps >= 100.
SteeringVerification verify_steering_by_integration(const SteeringPlan& plan, const HermitianMatrix& h, int steps);

/// Largest |eigenvalue| of a Hermitian matrix (its operator norm).
double hermitian_norm(const Matrix& m);

}  // namespace qbranch
