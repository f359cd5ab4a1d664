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
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "qbranch/collapse.hpp"
#include "qbranch/steering.hpp"

namespace qbranch {

struct ChainCost {
  std::vector<double> jumps;  // d_FS(T(x_i), x_{i+1})
  double total = 0.0;
};

/// Evaluates T at each point and sums the FS jumps. Needs >= 2 points.
ChainCost chain_cost(const std::vector<ProjectiveState>& points, const RealizedDynamics& dyn);

/// Strong (epsilon, d_FS)-chain: sum of jumps < epsilon.
class StrongChain {
 public:
  /// Throws InvalidArgument unless the points form a strong epsilon-chain.
  static StrongChain build(std::vector<ProjectiveState> points, const RealizedDynamics& dyn, double epsilon);

  const std::vector<ProjectiveState>& points() const noexcept { return points_; }
  const std::vector<double>& jump_costs() const noexcept { return jumps_; }
  double epsilon() const noexcept { return epsilon_; }
  double total() const noexcept { return total_; }
  int steps() const noexcept { return static_cast<int>(jumps_.size()); }

 private:
  StrongChain() = default;
  std::vector<ProjectiveState> points_;
  std::vector<double> jumps_;
  double epsilon_ = 0.0;
  double total_ = 0.0;
};

// Shortest paths --------------------------------------------------------------

/// Directed graph with non-negative edge costs.
class CostGraph {
 public:
  struct Edge {
    int to;
    double cost;
  };

  explicit CostGraph(int nodes);
  /// All ordered pairs (i, j), including i == j, with cost costs(i, j).
  static CostGraph dense(const Eigen::MatrixXd& costs);

  void add_edge(int from, int to, double cost);
  int size() const noexcept { return static_cast<int>(adjacency_.size()); }
  const std::vector<Edge>& out_edges(int node) const { return adjacency_.at(node); }

 private:
  std::vector<std::vector<Edge>> adjacency_;
};

struct SearchOptions {
  double cost_cap = std::numeric_limits<double>::infinity();  // paths must cost <= cap
  int max_hops = 0;                                           // 0 = unbounded
  bool nontrivial = false;  // when source == target, require at least one step
};

struct PathResult {
  double cost = 0.0;
  std::vector<int> path;  // node indices, source first
};

/// Additive-cost shortest path. With source == target and !nontrivial the
/// result is the zero-step path {source} at cost 0. Throws InfeasibleError
/// if no path satisfies the cap.
PathResult min_cost_search(const CostGraph& graph, int source, int target, const SearchOptions& options = {});

/// Single-source costs to every node (infinity where unreachable under the
/// options). Nontrivial is honoured for the source itself.
std::vector<double> min_costs_from(const CostGraph& graph, int source, const SearchOptions& options = {});

// State nets -------------------------------------------------------------------

enum class EdgeMode { Auto, Dense, Sparse };

struct NetParams {
  int node_count = 200;
  double thinning_radius = 0.05;
  std::uint64_t seed = 1;
  int candidate_factor = 8;  // candidate pool = node_count * factor
  int k_nearest = 16;        // out-degree in sparse mode
  EdgeMode edges = EdgeMode::Auto;
};

/// Finite carrier for the strong chain relation: nodes x_i, cached images
/// T(x_i) and edge costs d_FS(T(x_i), x_j).
class StateNet {
 public:
  /// Pinned states come first (indices 0..pinned-1); then up to node_count
  /// complex-Gaussian candidates chosen by farthest-point thinning, stopping
  /// once no candidate is >= thinning_radius from the net. The spacing
  /// guarantee covers sampled nodes only.
  static StateNet sample(const RealizedDynamics& dyn, const NetParams& params,
                         std::vector<ProjectiveState> pinned = {});
  /// Net on exactly the given nodes.
  static StateNet from_states(const RealizedDynamics& dyn, std::vector<ProjectiveState> nodes,
                              EdgeMode edges = EdgeMode::Dense, int k_nearest = 16);

  int size() const noexcept { return static_cast<int>(nodes_.size()); }
  const std::vector<ProjectiveState>& nodes() const noexcept { return nodes_; }
  const std::vector<ProjectiveState>& images() const noexcept { return images_; }
  int pinned_count() const noexcept { return pinned_; }
  bool dense() const noexcept { return dense_; }
  /// Largest distance from a candidate to the net when sampling stopped;
  /// zero for nets built from explicit states.
  double coverage_radius() const noexcept { return coverage_; }
  double edge_cost(int from, int to) const;
  const CostGraph& graph() const noexcept { return graph_; }
  int nearest(const ProjectiveState& x) const;

 private:
  StateNet(const RealizedDynamics& dyn, std::vector<ProjectiveState> nodes, EdgeMode edges, int k_nearest);

  std::vector<ProjectiveState> nodes_;
  std::vector<ProjectiveState> images_;
  CostGraph graph_{0};
  int pinned_ = 0;
  bool dense_ = true;
  double coverage_ = 0.0;
};

PathResult min_cost_search(const StateNet& net, int source, int target, const SearchOptions& options = {});

/// The net path as a chain; epsilon defaults to just above its cost.
StrongChain path_to_chain(const StateNet& net, const PathResult& path, const RealizedDynamics& dyn,
                          std::optional<double> epsilon = std::nullopt);

// Operational reversibility ---------------------------------------------------

struct PairReport {
  int from = 0;
  int to = 0;
  std::optional<double> forward;   // nullopt: infeasible under the cap
  std::optional<double> backward;
  std::vector<int> forward_path;
  std::vector<int> backward_path;
  bool symmetric = false;  // both directions < epsilon
};

struct ReversibilityReport {
  double epsilon = 0.0;
  double resolution = 0.0;
  std::vector<PairReport> pairs;
  bool operationally_reversible = true;  // every pair symmetric
  bool arrow_of_time = false;            // some pair < epsilon one way only
};

ReversibilityReport reversibility_report(const StateNet& net, const std::vector<std::pair<int, int>>& pairs,
                                         double epsilon, const SearchOptions& options = {});

// Composite steering ------------------------------------------------------------

struct SteerOptions {
  /// Also steer the last jump, on the window (N + 1/3, N + 2/3) after the
  /// chain's final step, so the run ends on the free orbit of x_N.
  bool terminal_correction = true;
  int ode_steps = 0;  // > 0: verify every plan by RK4 with this many steps
};

struct SteeredRun {
  StrongChain chain;
  std::vector<int> plan_steps;  // k for each plan (window (k+1/3, k+2/3))
  std::vector<SteeringPlan> plans;
  std::vector<SteeringVerification> verifications;
  std::vector<ProjectiveState> trajectory;  // realized states at integer times 0..N
  ProjectiveState achieved_final;
  double total_cost = 0.0;
  double final_error = 0.0;
};

/// Steers the realized dynamics along a strong chain x_0..x_N: for each k
/// the unitary segment of step k is perturbed on (k+1/3, k+2/3) so that
/// w_k = T(x_{k-1}) is carried onto U(k+2/3, k) x_k. Collapse labels are
/// those the rule assigns to the chain points the steering lands on.
SteeredRun steer_along_chain(const StrongChain& chain, const RealizedDynamics& dyn, const SteerOptions& options = {});

/// W(N) on [0, N]: the left-ordered product of the steered one-step
/// propagators U(k+1, k+2/3) V_k U(k+1/3, k) for k = 1..N-1 after U(1,0).
Matrix composed_propagator(const SteeredRun& run, const HermitianMatrix& h);

// Naive grid refinement ---------------------------------------------------------

struct GridScale {
  int k = 0;
  double epsilon = 0.0;    // 2^-k
  double cell_size = 0.0;  // side of the dyadic cube in canonical coordinates
  std::vector<std::int64_t> cell;
  int first_visit = 0;
  int second_visit = 0;
  bool nests_previous = true;
};

/// Scans one forward orbit of length `budget` and, at each scale
/// epsilon_k = 2^-k, reports the first cell visited twice. Cells are dyadic
/// cubes in the real coordinates of the canonical representative, each of FS
/// diameter < epsilon_k, so scale k+1 refines scale k exactly. Throws
/// BudgetError when some scale sees no revisit.
std::vector<GridScale> grid_refinement_diagnostic(const RealizedDynamics& dyn, const ProjectiveState& x0,
                                                  const std::vector<int>& scales, int budget);

}  // namespace qbranch
