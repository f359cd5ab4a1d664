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

#include "qbranch/chains.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <queue>
#include <string>
#include <unordered_map>

#include "qbranch/sampling.hpp"

namespace qbranch {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Shortest-path tree from one source. When the search is nontrivial the
// source is replaced by a virtual start node (index n) carrying the
// source's out-edges, so the source itself can be reached by a loop.
class SearchTree {
 public:
  SearchTree(const CostGraph& graph, int source, const SearchOptions& options)
      : n_(graph.size()), source_(source), start_(options.nontrivial ? graph.size() : source) {
    if (source < 0 || source >= n_) throw InvalidArgument("source node " + std::to_string(source) + " out of range");
    auto edges_of = [&](int node) -> const std::vector<CostGraph::Edge>& {
      return graph.out_edges(node == n_ ? source : node);
    };
    if (options.max_hops > 0) {
      layered(edges_of, options);
    } else {
      dijkstra(edges_of, options);
    }
  }

  double cost_to(int target) const {
    if (target < 0 || target >= n_) throw InvalidArgument("target node " + std::to_string(target) + " out of range");
    return best_[target];
  }

  std::vector<int> path(int target) const {
    std::vector<int> out;
    if (!std::isfinite(cost_to(target))) return out;
    int node = target;
    int layer = best_layer_[target];
    out.push_back(node);
    while (layered_ ? layer > 0 : node != start_) {
      node = pred_[layered_ ? layer : 0][node];
      --layer;
      out.push_back(node == n_ ? source_ : node);
    }
    std::reverse(out.begin(), out.end());
    return out;
  }

 private:
  template <class EdgesOf>
  void dijkstra(const EdgesOf& edges_of, const SearchOptions& options) {
    std::vector<double> dist(n_ + 1, kInf);
    pred_.assign(1, std::vector<int>(n_ + 1, -1));
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[start_] = 0.0;
    heap.emplace(0.0, start_);
    std::vector<char> done(n_ + 1, 0);
    while (!heap.empty()) {
      const auto [d, u] = heap.top();
      heap.pop();
      if (done[u]) continue;
      done[u] = 1;
      for (const auto& e : edges_of(u)) {
        const double nd = d + e.cost;
        if (nd > options.cost_cap) continue;
        if (nd < dist[e.to]) {
          dist[e.to] = nd;
          pred_[0][e.to] = u;
          heap.emplace(nd, e.to);
        }
      }
    }
    best_.assign(dist.begin(), dist.begin() + n_);
    best_layer_.assign(n_, 0);
    layered_ = false;
  }

  template <class EdgesOf>
  void layered(const EdgesOf& edges_of, const SearchOptions& options) {
    const int layers = options.max_hops;
    std::vector<double> current(n_ + 1, kInf);
    current[start_] = 0.0;
    best_.assign(n_, kInf);
    best_layer_.assign(n_, 0);
    if (start_ < n_) best_[start_] = 0.0;
    pred_.assign(layers + 1, std::vector<int>(n_ + 1, -1));
    for (int h = 1; h <= layers; ++h) {
      std::vector<double> next(n_ + 1, kInf);
      for (int u = 0; u <= n_; ++u) {
        if (!std::isfinite(current[u])) continue;
        for (const auto& e : edges_of(u)) {
          const double nd = current[u] + e.cost;
          if (nd > options.cost_cap) continue;
          if (nd < next[e.to]) {
            next[e.to] = nd;
            pred_[h][e.to] = u;
          }
        }
      }
      for (int v = 0; v < n_; ++v) {
        if (next[v] < best_[v]) {
          best_[v] = next[v];
          best_layer_[v] = h;
        }
      }
      current = std::move(next);
    }
    layered_ = true;
  }

 private:
  int n_;
  int source_;
  int start_;
  bool layered_ = false;
  std::vector<double> best_;
  std::vector<int> best_layer_;
  std::vector<std::vector<int>> pred_;
};

Vector collapse_vector(const Vector& evolved, const Observable& a, OutcomeLabel j) {
  if (j.value == 0) return evolved;
  const Vector projected = a.projector(j) * evolved;
  if (projected.norm() <= kZeroWeightThreshold) {
    throw AdmissibilityError("label " + std::to_string(j.value) + " has zero Born weight on the steered state");
  }
  return projected;
}

}  // namespace

ChainCost chain_cost(const std::vector<ProjectiveState>& points, const RealizedDynamics& dyn) {
  if (points.size() < 2) throw InvalidArgument("a chain needs at least two points");
  ChainCost out;
  out.jumps.reserve(points.size() - 1);
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    out.jumps.push_back(fs_distance(dyn.image(points[i]), points[i + 1]));
    out.total += out.jumps.back();
  }
  return out;
}

StrongChain StrongChain::build(std::vector<ProjectiveState> points, const RealizedDynamics& dyn, double epsilon) {
  ChainCost cost = chain_cost(points, dyn);
  if (!(cost.total < epsilon)) {
    throw InvalidArgument("jump total " + std::to_string(cost.total) + " is not below epsilon " + std::to_string(epsilon));
  }
  StrongChain c;
  c.points_ = std::move(points);
  c.jumps_ = std::move(cost.jumps);
  c.total_ = cost.total;
  c.epsilon_ = epsilon;
  return c;
}

CostGraph::CostGraph(int nodes) : adjacency_(std::max(nodes, 0)) {}

CostGraph CostGraph::dense(const Eigen::MatrixXd& costs) {
  if (costs.rows() != costs.cols()) throw InvalidArgument("dense cost matrix must be square");
  CostGraph g(static_cast<int>(costs.rows()));
  for (int i = 0; i < costs.rows(); ++i)
    for (int j = 0; j < costs.cols(); ++j) g.add_edge(i, j, costs(i, j));
  return g;
}

void CostGraph::add_edge(int from, int to, double cost) {
  if (from < 0 || from >= size() || to < 0 || to >= size()) throw InvalidArgument("edge endpoint out of range");
  if (!(cost >= 0.0)) throw InvalidArgument("edge costs must be non-negative");
  adjacency_[from].push_back({to, cost});
}

PathResult min_cost_search(const CostGraph& graph, int source, int target, const SearchOptions& options) {
  const SearchTree tree(graph, source, options);
  const double cost = tree.cost_to(target);
  if (!std::isfinite(cost)) {
    throw InfeasibleError("node " + std::to_string(target) + " unreachable from " + std::to_string(source) +
                          " under the cost/hop cap");
  }
  return {cost, tree.path(target)};
}

std::vector<double> min_costs_from(const CostGraph& graph, int source, const SearchOptions& options) {
  const SearchTree tree(graph, source, options);
  std::vector<double> out(graph.size());
  for (int t = 0; t < graph.size(); ++t) out[t] = tree.cost_to(t);
  return out;
}

StateNet::StateNet(const RealizedDynamics& dyn, std::vector<ProjectiveState> nodes, EdgeMode edges, int k_nearest)
    : nodes_(std::move(nodes)) {
  if (nodes_.size() < 2) throw InvalidArgument("a state net needs at least two nodes");
  images_.reserve(nodes_.size());
  for (const auto& x : nodes_) images_.push_back(dyn.image(x));
  const int n = size();
  dense_ = edges == EdgeMode::Dense || (edges == EdgeMode::Auto && dyn.dim() <= 4 && n <= 500);
  graph_ = CostGraph(n);
  if (dense_) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) graph_.add_edge(i, j, fs_distance(images_[i], nodes_[j]));
    return;
  }
  const int k = std::clamp(k_nearest, 1, n);
  std::vector<std::pair<double, int>> near(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) near[j] = {fs_distance(images_[i], nodes_[j]), j};
    std::partial_sort(near.begin(), near.begin() + k, near.end());
    for (int r = 0; r < k; ++r) graph_.add_edge(i, near[r].second, near[r].first);
  }
}

StateNet StateNet::sample(const RealizedDynamics& dyn, const NetParams& params, std::vector<ProjectiveState> pinned) {
  if (params.node_count < 1 && pinned.size() < 2) throw InvalidArgument("state net needs node_count >= 1");
  const int d = dyn.dim();
  StateSampler sampler(params.seed);
  const int pool_size = std::max(params.node_count * std::max(params.candidate_factor, 1), params.node_count);
  std::vector<ProjectiveState> pool;
  pool.reserve(pool_size);
  for (int c = 0; c < pool_size; ++c) pool.push_back(sampler.state(d));

  std::vector<ProjectiveState> nodes = std::move(pinned);
  const int pinned_count = static_cast<int>(nodes.size());
  std::vector<double> gap(pool_size, kInf);
  std::vector<char> used(pool_size, 0);
  auto absorb = [&](const ProjectiveState& x) {
    for (int c = 0; c < pool_size; ++c) gap[c] = std::min(gap[c], fs_distance(x, pool[c]));
  };
  for (const auto& x : nodes) absorb(x);
  double coverage = 0.0;
  int added = 0;
  while (added < params.node_count) {
    int best = -1;
    for (int c = 0; c < pool_size; ++c) {
      if (!used[c] && (best < 0 || gap[c] > gap[best])) best = c;
    }
    if (best < 0) break;
    if (gap[best] < params.thinning_radius) break;
    used[best] = 1;
    nodes.push_back(pool[best]);
    absorb(pool[best]);
    ++added;
  }
  for (int c = 0; c < pool_size; ++c) coverage = std::max(coverage, gap[c]);

  StateNet net(dyn, std::move(nodes), params.edges, params.k_nearest);
  net.pinned_ = pinned_count;
  net.coverage_ = coverage;
  return net;
}

StateNet StateNet::from_states(const RealizedDynamics& dyn, std::vector<ProjectiveState> nodes, EdgeMode edges,
                               int k_nearest) {
  StateNet net(dyn, std::move(nodes), edges, k_nearest);
  net.pinned_ = net.size();
  return net;
}

double StateNet::edge_cost(int from, int to) const {
  return fs_distance(images_.at(from), nodes_.at(to));
}

int StateNet::nearest(const ProjectiveState& x) const {
  int best = 0;
  double best_d = kInf;
  for (int i = 0; i < size(); ++i) {
    const double d = fs_distance(x, nodes_[i]);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

PathResult min_cost_search(const StateNet& net, int source, int target, const SearchOptions& options) {
  return min_cost_search(net.graph(), source, target, options);
}

StrongChain path_to_chain(const StateNet& net, const PathResult& path, const RealizedDynamics& dyn,
                          std::optional<double> epsilon) {
  std::vector<ProjectiveState> points;
  for (int i : path.path) points.push_back(net.nodes().at(i));
  const double eps = epsilon.value_or(std::nextafter(path.cost, kInf) + 1e-12);
  return StrongChain::build(std::move(points), dyn, eps);
}

ReversibilityReport reversibility_report(const StateNet& net, const std::vector<std::pair<int, int>>& pairs,
                                         double epsilon, const SearchOptions& options) {
  ReversibilityReport report;
  report.epsilon = epsilon;
  report.resolution = net.coverage_radius();
  std::map<int, SearchTree> trees;
  auto tree_for = [&](int s) -> const SearchTree& {
    auto it = trees.find(s);
    if (it == trees.end()) it = trees.emplace(s, SearchTree(net.graph(), s, options)).first;
    return it->second;
  };
  for (const auto& [u, v] : pairs) {
    PairReport pr;
    pr.from = u;
    pr.to = v;
    const SearchTree& fwd = tree_for(u);
    const double f = fwd.cost_to(v);
    if (std::isfinite(f)) {
      pr.forward = f;
      pr.forward_path = fwd.path(v);
    }
    const SearchTree& bwd = tree_for(v);
    const double b = bwd.cost_to(u);
    if (std::isfinite(b)) {
      pr.backward = b;
      pr.backward_path = bwd.path(u);
    }
    const bool f_ok = pr.forward && *pr.forward < epsilon;
    const bool b_ok = pr.backward && *pr.backward < epsilon;
    pr.symmetric = f_ok && b_ok;
    report.operationally_reversible = report.operationally_reversible && pr.symmetric;
    report.arrow_of_time = report.arrow_of_time || (f_ok != b_ok);
    report.pairs.push_back(std::move(pr));
  }
  return report;
}

SteeredRun steer_along_chain(const StrongChain& chain, const RealizedDynamics& dyn, const SteerOptions& options) {
  const auto& x = chain.points();
  const int n = chain.steps();
  const HermitianMatrix& h = dyn.hamiltonian();
  const Propagator prop(h);
  const Matrix third = prop.at(1.0 / 3.0);
  const Observable& a = dyn.observable();

  std::vector<int> plan_steps;
  std::vector<SteeringPlan> plans;
  std::vector<SteeringVerification> checks;
  const int last_plan = options.terminal_correction ? n : n - 1;
  for (int k = 1; k <= last_plan; ++k) {
    const ProjectiveState w = dyn.image(x[k - 1]);
    const ProjectiveState target(prop.at(2.0 / 3.0) * x[k].amplitudes());
    plans.push_back(synthesize_steering(w, h, k, k + 1.0 / 3.0, k + 2.0 / 3.0, target));
    plan_steps.push_back(k);
    if (options.ode_steps > 0) checks.push_back(verify_steering_by_integration(plans.back(), h, options.ode_steps));
  }

  // Realized states under the steered evolution.
  std::vector<ProjectiveState> trajectory{x[0]};
  for (int k = 0; k < n; ++k) {
    Vector evolved = dyn.step_unitary().matrix() * trajectory.back().amplitudes();
    if (k >= 1) {
      const SteeringPlan& plan = plans[k - 1];
      evolved = third * (plan.closed_form_propagator.matrix() * (third * trajectory.back().amplitudes()));
    }
    trajectory.emplace_back(collapse_vector(evolved, a, dyn.label(x[k])));
  }

  Vector final_state = trajectory.back().amplitudes();
  if (options.terminal_correction) {
    const SteeringPlan& plan = plans.back();
    const Matrix pulled_back = prop.at(2.0 / 3.0).adjoint() * plan.closed_form_propagator.matrix() * third;
    final_state = pulled_back * final_state;
  }
  ProjectiveState achieved(final_state);
  double total = 0.0;
  for (const auto& p : plans) total += p.cost;
  const double error = fs_distance(achieved, x[n]);
  return SteeredRun{
      .chain = chain,
      .plan_steps = std::move(plan_steps),
      .plans = std::move(plans),
      .verifications = std::move(checks),
      .trajectory = std::move(trajectory),
      .achieved_final = std::move(achieved),
      .total_cost = total,
      .final_error = error,
  };
}

Matrix composed_propagator(const SteeredRun& run, const HermitianMatrix& h) {
  const Propagator prop(h);
  const Matrix third = prop.at(1.0 / 3.0);
  Matrix w = prop.at(1.0);
  const int n = run.chain.steps();
  for (std::size_t p = 0; p < run.plans.size(); ++p) {
    if (run.plan_steps[p] >= n) continue;
    w = third * run.plans[p].closed_form_propagator.matrix() * third * w;
  }
  return w;
}

std::vector<GridScale> grid_refinement_diagnostic(const RealizedDynamics& dyn, const ProjectiveState& x0,
                                                  const std::vector<int>& scales, int budget) {
  if (scales.empty()) throw InvalidArgument("grid diagnostic needs at least one scale");
  if (budget < 1) throw InvalidArgument("grid diagnostic needs a positive orbit budget");
  for (std::size_t i = 1; i < scales.size(); ++i) {
    if (scales[i] <= scales[i - 1]) throw InvalidArgument("grid scales must be strictly increasing");
  }
  if (scales.front() < 1 || scales.back() > 40) throw InvalidArgument("grid scales must lie in 1..40");

  std::vector<ProjectiveState> orbit{x0};
  orbit.reserve(budget + 1);
  for (int s = 0; s < budget; ++s) orbit.push_back(dyn.image(orbit.back()));

  const int d = dyn.dim();
  const int coords = 2 * d;
  // Cube side at scale 1 keeps the Euclidean diameter below 2 sin(eps_1/2),
  // so the FS diameter stays below eps_1; halving preserves the bound.
  const double base_side = 0.999 * 2.0 * std::sin(0.25) / std::sqrt(static_cast<double>(coords));
  // A common irrational offset keeps basis states off cube faces.
  const double origin = -std::numbers::pi / 7.0;

  auto cell_of = [&](const ProjectiveState& x, double side) {
    std::vector<std::int64_t> key(coords);
    for (int i = 0; i < d; ++i) {
      key[2 * i] = static_cast<std::int64_t>(std::floor((x.amplitudes()[i].real() - origin) / side));
      key[2 * i + 1] = static_cast<std::int64_t>(std::floor((x.amplitudes()[i].imag() - origin) / side));
    }
    return key;
  };

  std::vector<GridScale> out;
  for (int k : scales) {
    GridScale gs;
    gs.k = k;
    gs.epsilon = std::ldexp(1.0, -k);
    gs.cell_size = std::ldexp(base_side, -(k - 1));
    std::map<std::vector<std::int64_t>, int> first_seen;
    bool found = false;
    for (int t = 0; t < static_cast<int>(orbit.size()); ++t) {
      auto key = cell_of(orbit[t], gs.cell_size);
      auto [it, inserted] = first_seen.emplace(key, t);
      if (!inserted) {
        gs.cell = std::move(key);
        gs.first_visit = it->second;
        gs.second_visit = t;
        found = true;
        break;
      }
    }
    if (!found) {
      throw BudgetError("no cell revisited at scale 2^-" + std::to_string(k) + " within " + std::to_string(budget) +
                        " steps");
    }
    if (!out.empty()) {
      const GridScale& prev = out.back();
      const int shift = k - prev.k;
      bool nests = true;
      for (int c = 0; c < coords; ++c) nests = nests && ((gs.cell[c] >> shift) == prev.cell[c]);
      gs.nests_previous = nests;
    }
    out.push_back(std::move(gs));
  }
  return out;
}

}  // namespace qbranch
