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

#include <cstdint>
#include <random>

#include "qbranch/qstate.hpp"

namespace qbranch {

/// Seeded source of random states and matrices. Draws use Box-Muller over
/// the raw mt19937_64 stream, so sequences are identical across standard
/// library implementations.
class StateSampler {
 public:
  explicit StateSampler(std::uint64_t seed) : engine_(seed) {}

  double uniform();
  double normal();
  Complex complex_normal();

  /// Normalized complex-Gaussian vector: uniform on CP^(dim-1) under the
  /// Fubini-Study volume.
  ProjectiveState state(int dim);
  /// Haar-distributed unitary via QR of a Ginibre matrix.
  UnitaryMatrix unitary(int dim);
  HermitianMatrix hermitian(int dim, double scale = 1.0);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace qbranch
