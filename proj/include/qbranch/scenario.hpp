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

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qbranch/chains.hpp"
#include "qbranch/collapse.hpp"

namespace qbranch {

struct SteerWindow {
  double tau0 = 1.0;
  double tau = 4.0 / 3.0;
  double tau1 = 5.0 / 3.0;
  int ode_steps = 1000;  // 0 skips the RK4 check
  bool terminal_correction = true;
};

struct Budgets {
  int orbit_len = 1000;
  int max_limit_stages = 8;
  int horizon = 1000;
  int max_hops = 0;  // path-length cap for searches, 0 = none
  int grid_budget = 100000;
  int size_cap = 4096;
};

struct RecurrenceSettings {
  double bucket_radius = 0.0;  // 0: epsilon / 2
  int m_min = 5;
  int max_back = 512;
  int refine_nodes = 300;
};

struct OutputSettings {
  std::string directory = ".";
  bool json = true;
  bool csv = true;
};

/// One experiment description. Everything except the dynamics has a
/// default; stochastic parts (hashed rules, nets) must carry a seed.
struct Scenario {
  std::string source = "<string>";
  int dim = 2;
  std::optional<HermitianMatrix> hamiltonian;
  std::optional<Observable> observable;
  ChoiceRule rule;
  std::optional<ProjectiveState> x0;
  std::optional<ProjectiveState> target;
  int steps = 10;
  double epsilon = 0.05;
  std::vector<double> scales{0.1, 0.03, 0.01};
  SteerWindow steer;
  NetParams net;
  bool has_net = false;
  std::vector<ProjectiveState> pinned;
  std::vector<std::pair<int, int>> pairs;
  Budgets budgets;
  RecurrenceSettings recurrence;
  std::vector<int> grid_scales{1, 2, 3, 4, 5, 6};
  OutputSettings output;

  RealizedDynamics dynamics() const;
  /// Replaces every seed (choice rule, table fallback, net).
  void override_seed(std::uint64_t seed);
};

/// ConfigError on malformed input: syntax errors carry line and column,
/// semantic errors the JSON pointer of the offending field.
Scenario parse_scenario(const std::string& text, const std::string& source = "<string>");
Scenario load_scenario(const std::string& path);

/// A state literal: [[re, im], ...], a list of reals, {"basis": k} or k.
ProjectiveState parse_state_literal(const std::string& text, int dim);

}  // namespace qbranch
