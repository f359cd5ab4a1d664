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

#include <compare>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qbranch/qstate.hpp"

namespace qbranch {

/// Outcomes below this norm ||P_j U u|| count as zero Born weight.
inline constexpr double kZeroWeightThreshold = 1e-12;

/// Outcome index in {0, ..., m}. Zero is the blank (no-collapse) channel.
struct OutcomeLabel {
  int value = 0;
  auto operator<=>(const OutcomeLabel&) const = default;
};

using Itinerary = std::vector<OutcomeLabel>;

/// Projection-valued measure P_1..P_m of a single observable with distinct
/// eigenvalues. The blank channel P_0 = I is implicit.
class Observable {
 public:
  /// Checks idempotence, Hermiticity, pairwise orthogonality, completeness
  /// (all within 1e-10), nonzero projectors and distinct eigenvalues.
  Observable(std::vector<HermitianMatrix> projectors, std::vector<double> eigenvalues);

  /// Projectors onto groups of columns of an orthonormal basis.
  static Observable from_eigenbasis(const UnitaryMatrix& basis, const std::vector<std::vector<int>>& partition,
                                    std::vector<double> eigenvalues);
  /// Rank-one projectors onto the computational basis, eigenvalues 1..dim.
  static Observable computational(int dim);

  int dim() const noexcept { return projectors_.front().dim(); }
  /// Number m of non-blank outcomes.
  int outcomes() const noexcept { return static_cast<int>(projectors_.size()); }
  /// P_j for j in 1..m; P_0 = I.
  Matrix projector(OutcomeLabel j) const;
  const std::vector<double>& eigenvalues() const noexcept { return eigenvalues_; }
  /// A = sum_j lambda_j P_j.
  HermitianMatrix as_operator() const;

 private:
  std::vector<HermitianMatrix> projectors_;
  std::vector<double> eigenvalues_;
};

// Choice rules ---------------------------------------------------------------

struct BlankOnlyRule {};

/// Largest Born weight among labels 1..m; lowest index wins ties.
struct BornGreedyRule {};

/// Hashes the canonical state bytes with `seed` into u in [0,1). Returns the
/// blank label when u < blank_probability, otherwise samples the Born
/// distribution over the admissible labels 1..m with the rescaled u.
struct HashedBornRule {
  std::uint64_t seed = 0;
  double blank_probability = 0.0;
};

struct TableEntry {
  ProjectiveState state;
  OutcomeLabel label;
};

/// Explicit labels on a finite set of states, matched within
/// `match_tolerance` in FS distance (first match wins). Other states defer
/// to `fallback`.
struct TableRule {
  std::vector<TableEntry> entries;
  double match_tolerance = 1e-9;
  std::variant<BlankOnlyRule, BornGreedyRule, HashedBornRule> fallback = BlankOnlyRule{};
};

/// Per-step selector g. The induced itinerary D(u)_n = g(T^n u) is
/// compatible with the shift by construction.
class ChoiceRule {
 public:
  using Kind = std::variant<BlankOnlyRule, BornGreedyRule, HashedBornRule, TableRule>;

  ChoiceRule() = default;
  ChoiceRule(Kind kind);  // NOLINT(google-explicit-constructor)

  /// Deterministic in the canonical state. Does not check admissibility of
  /// table entries; step_realized does.
  OutcomeLabel choose(const ProjectiveState& u, const UnitaryMatrix& step, const Observable& a) const;

  const Kind& kind() const noexcept { return kind_; }
  std::string name() const;

 private:
  Kind kind_ = BlankOnlyRule{};
};

/// (1, ||P_1 U u||^2, ..., ||P_m U u||^2).
std::vector<double> born_weights(const ProjectiveState& u, const UnitaryMatrix& step, const Observable& a);

/// f_j(u) = P_j U u / ||P_j U u||, with f_0(u) = U u. Throws
/// ZeroBornWeightError when ||P_j U u|| <= 1e-12.
ProjectiveState apply_collapse(const ProjectiveState& u, const UnitaryMatrix& step, const Observable& a,
                               OutcomeLabel j);

struct RealizedStep {
  ProjectiveState state;
  OutcomeLabel label;
};

/// One step of the induced map T. Throws AdmissibilityError if the rule
/// picks a label outside {0..m} or with zero Born weight.
RealizedStep step_realized(const ProjectiveState& u, const UnitaryMatrix& step, const Observable& a,
                           const ChoiceRule& g);

struct Realization {
  Itinerary itinerary;                  // N labels
  std::vector<ProjectiveState> states;  // N + 1 states
};

Realization realize_itinerary(const ProjectiveState& u, const UnitaryMatrix& step, const Observable& a,
                              const ChoiceRule& g, int steps);

/// Recomputes the realization starting from states[1] and checks that it
/// reproduces the shifted itinerary and states bitwise.
bool verify_compatibility(const Realization& r, const UnitaryMatrix& step, const Observable& a,
                          const ChoiceRule& g);

/// Point of the skew product: outcome prefix plus state.
struct SkewPoint {
  Itinerary itinerary;
  ProjectiveState state;
};

/// F(omega, u) = (sigma omega, f_{omega_0}(u)).
SkewPoint step_skew(const SkewPoint& p, const UnitaryMatrix& step, const Observable& a);

/// Fraction of `samples` random states u with ||P_j U u|| > 1e-12.
double domain_fraction(const UnitaryMatrix& step, const Observable& a, OutcomeLabel j, int samples,
                       std::uint64_t seed);

struct LabelDensity {
  OutcomeLabel label;
  int sample_count = 0;  // samples with g = label
  bool attained = false;
  /// Max over probes of (distance to nearest label-j sample) minus
  /// (distance to nearest sample of any label). Zero means the label is as
  /// dense as the sampling itself. Infinity when unattained.
  double radius = std::numeric_limits<double>::infinity();
  /// Max over probes of the raw nearest label-j distance.
  double nearest_max = std::numeric_limits<double>::infinity();
  double nearest_mean = std::numeric_limits<double>::infinity();
};

struct DensityProbe {
  int samples = 0;
  int probes = 0;
  std::vector<LabelDensity> labels;  // index j -> label j
};

/// Empirical accessibility of each label: draws `samples` random states,
/// labels them with g, and measures nearest-neighbour distances from a fixed
/// probe set (derived from `seed`). Requires samples >= 100.
DensityProbe label_density_probe(const ChoiceRule& g, const UnitaryMatrix& step, const Observable& a, int samples,
                                 std::uint64_t seed, int probes = 256);

/// Same statistics on explicit sample and probe sets.
DensityProbe label_density_probe(const ChoiceRule& g, const UnitaryMatrix& step, const Observable& a,
                                 const std::vector<ProjectiveState>& samples,
                                 const std::vector<ProjectiveState>& probes);

/// Bundles the ambient Hamiltonian H, the one-step unitary U = exp(-iH),
/// the observable and the choice rule defining the realized map T.
class RealizedDynamics {
 public:
  RealizedDynamics(HermitianMatrix hamiltonian, Observable observable, ChoiceRule rule);

  const HermitianMatrix& hamiltonian() const noexcept { return hamiltonian_; }
  const UnitaryMatrix& step_unitary() const noexcept { return step_; }
  const Observable& observable() const noexcept { return observable_; }
  const ChoiceRule& rule() const noexcept { return rule_; }
  int dim() const noexcept { return hamiltonian_.dim(); }

  RealizedStep step(const ProjectiveState& u) const { return step_realized(u, step_, observable_, rule_); }
  ProjectiveState image(const ProjectiveState& u) const { return step(u).state; }
  OutcomeLabel label(const ProjectiveState& u) const { return rule_.choose(u, step_, observable_); }

 private:
  HermitianMatrix hamiltonian_;
  UnitaryMatrix step_;
  Observable observable_;
  ChoiceRule rule_;
};

}  // namespace qbranch
