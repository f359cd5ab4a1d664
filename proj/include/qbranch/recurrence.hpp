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

#include <optional>
#include <utility>
#include <vector>

#include "qbranch/chains.hpp"
#include "qbranch/collapse.hpp"

namespace qbranch {

/// FS tolerance under which two states count as the same point.
inline constexpr double kExactRevisitTolerance = 1e-10;

enum class StageKind { Orbit, Limit };

/// How a limit-stage point was chosen.
struct LimitProvenance {
  double bucket_radius = 0.0;
  int visit_count = 0;   // history points inside the bucket
  int bucket_index = 0;  // history point the bucket is centred on
};

enum class StageTermination { ExactRevisit, Budget };

/// Finite stage history: orbit runs x_{k+1} = T(x_k), each (after the
/// first) started from a limit point that stands in for an accumulation
/// point of everything seen so far.
struct StageSequence {
  std::vector<ProjectiveState> points;
  std::vector<StageKind> kinds;        // per point; the first point of each later stage is Limit
  std::vector<int> stage_of;           // stage index of each point
  std::vector<int> stage_starts;       // first point index of each stage
  std::vector<LimitProvenance> limits; // one per limit stage, in order
  StageTermination termination = StageTermination::Budget;
  int revisit_of = -1;  // with ExactRevisit: earlier index the last point repeats

  int size() const noexcept { return static_cast<int>(points.size()); }
  int stage_end(int stage) const;  // one past the last point of the stage
};

struct StageBudget {
  int orbit_len = 1000;
  int max_limit_stages = 8;
};

/// Alternates orbit runs of `orbit_len` steps with limit stages. A limit
/// stage picks the history point whose FS ball of `bucket_radius` holds the
/// most history points (earliest on ties; StagnationError if fewer than
/// m_min) and continues from the projective mean of that ball. Stops at the
/// budget or when a point repeats an earlier one within 1e-10.
StageSequence run_stages(const ProjectiveState& x0, const RealizedDynamics& dyn, const StageBudget& budget,
                         double bucket_radius, int m_min = 5);

/// True when every orbit step of the sequence replays bitwise under T.
bool replay_orbit_stages(const StageSequence& seq, const RealizedDynamics& dyn);

struct ScaleLoop {
  double epsilon = 0.0;
  bool found = false;
  std::optional<StrongChain> chain;  // base -> ... -> base
  double cost = 0.0;
  /// Largest distance from the base of the two endpoints of the loop's
  /// closing jump.
  double closing_offset = 0.0;
};

struct RecurrenceCertificate {
  ProjectiveState base = ProjectiveState::basis(2, 0);
  int base_index = 0;
  int base_visits = 0;
  double base_radius = 0.0;
  std::vector<double> scales;  // strictly decreasing
  std::vector<ScaleLoop> loops;
  bool complete = false;  // every scale found
  /// Every loop found and, from the second scale on, its closing jump lies
  /// inside the previous scale's ball around the base.
  bool nested = false;
};

struct CertifyOptions {
  double base_radius = 0.0;  // 0: half the smallest scale
  int max_back = 512;        // how far before the base a loop may re-enter
  int refine_nodes = 300;    // net size for the shortest-path fallback
};

/// Strong epsilon-loops at one base point for each scale. Loops follow the
/// stored orbit from the base and close with a single jump, either onto the
/// base itself or onto an earlier point of the base's orbit run; when no
/// such loop exists a nontrivial shortest loop is searched on a net of
/// nearby history points. Missing scales give a partial certificate.
RecurrenceCertificate certify_recurrence(const StageSequence& seq, const RealizedDynamics& dyn,
                                         const std::vector<double>& scales, const CertifyOptions& options = {});

struct TransitiveSetApprox {
  std::vector<ProjectiveState> members;
  double scale = 0.0;
  Eigen::MatrixXd pairwise_costs;  // (i, j): chain cost upper bound i -> j inside the set; diagonal is the loop cost
  double invariance_gap = 0.0;     // max over members of d(T(m), nearest member)
  double max_pairwise = 0.0;
  bool invariant = false;          // invariance_gap < scale
  bool transitive = false;         // every pairwise cost < scale
  int first_visit = 0;
  int second_visit = 0;
};

/// The stage points between the first and second visits to the base
/// bucket (radius scale/2, within the base's orbit run), closed under
/// T-images until approximately invariant. SizeCapError past `size_cap`;
/// InfeasibleError if the base bucket is not revisited in the run.
/// A negative base_index picks the most-revisited point at radius scale/2.
/// T-images are added while they are at least scale/2 from every member.
TransitiveSetApprox extract_transitive_set(const StageSequence& seq, const RealizedDynamics& dyn, double scale,
                                           int base_index = -1, int size_cap = 4096);

/// Index of the history point whose FS ball of `radius` holds the most
/// history points, with that count; earliest index on ties. For long
/// histories only every k-th point is tried as a centre (at most 2000).
std::pair<int, int> most_revisited(const std::vector<ProjectiveState>& points, double radius);

struct Periodicity {
  int period = 0;
  int entry = 0;  // first index on the cycle
  std::vector<ProjectiveState> cycle;
};

/// First exact revisit (FS < 1e-10) of the orbit within `horizon` steps.
std::optional<Periodicity> detect_periodicity(const ProjectiveState& x0, const RealizedDynamics& dyn, int horizon);

}  // namespace qbranch
