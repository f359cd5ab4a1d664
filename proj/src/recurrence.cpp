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

#include "qbranch/recurrence.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "qbranch/error.hpp"

namespace qbranch {
namespace {

// Candidate filter for exact revisits: a phase-free weighted sum of the
// populations moves by at most 2 * max weight * d_FS between two rays.
class RevisitIndex {
 public:
  explicit RevisitIndex(int dim) : weights_(dim) {
    const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int k = 0; k < dim; ++k) {
      const double w = (k + 1) * golden;
      weights_[k] = 0.5 + (w - std::floor(w));
    }
    window_ = 2.0 * 1.5 * kExactRevisitTolerance * 1.01 + 1e-15;
  }

  int find(const ProjectiveState& x, const std::vector<ProjectiveState>& points) const {
    const double k = key(x);
    int best = -1;
    for (auto it = index_.lower_bound(k - window_); it != index_.end() && it->first <= k + window_; ++it) {
      if (fs_distance(x, points[it->second]) < kExactRevisitTolerance && (best < 0 || it->second < best))
        best = it->second;
    }
    return best;
  }

  void insert(const ProjectiveState& x, int idx) { index_.emplace(key(x), idx); }

 private:
  double key(const ProjectiveState& x) const {
    double s = 0.0;
    for (int k = 0; k < x.dim(); ++k) s += weights_[k] * std::norm(x.amplitudes()[k]);
    return s;
  }

  std::vector<double> weights_;
  double window_ = 0.0;
  std::multimap<double, int> index_;
};

int count_within(const std::vector<ProjectiveState>& points, const ProjectiveState& c, double radius) {
  int n = 0;
  for (const auto& p : points)
    if (fs_distance(c, p) < radius) ++n;
  return n;
}

ProjectiveState projective_mean(const std::vector<ProjectiveState>& points, const ProjectiveState& c,
                                double radius) {
  const int d = c.dim();
  Matrix rho = Matrix::Zero(d, d);
  for (const auto& p : points)
    if (fs_distance(c, p) < radius) rho += p.amplitudes() * p.amplitudes().adjoint();
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
  return ProjectiveState(es.eigenvectors().col(d - 1));
}

int stage_start_of(const StageSequence& seq, int idx) { return seq.stage_starts.at(seq.stage_of.at(idx)); }

// T(points[j]); reuses the stored successor inside an orbit run.
ProjectiveState successor(const StageSequence& seq, const RealizedDynamics& dyn, int j) {
  const int stage = seq.stage_of[j];
  if (j + 1 < seq.stage_end(stage)) return seq.points[j + 1];
  return dyn.image(seq.points[j]);
}

// Distance from the base of the endpoints of jump `at` (largest jump if -1).
double jump_offset(const StrongChain& chain, const RealizedDynamics& dyn, const ProjectiveState& base, long at) {
  const auto& pts = chain.points();
  const auto& jumps = chain.jump_costs();
  if (jumps.empty()) return 0.0;
  if (at < 0) at = std::max_element(jumps.begin(), jumps.end()) - jumps.begin();
  const ProjectiveState from = dyn.image(pts[at]);
  return std::max(fs_distance(from, base), fs_distance(pts[at + 1], base));
}

}  // namespace

int StageSequence::stage_end(int stage) const {
  if (stage + 1 < static_cast<int>(stage_starts.size())) return stage_starts[stage + 1];
  return size();
}

std::pair<int, int> most_revisited(const std::vector<ProjectiveState>& points, double radius) {
  if (points.empty()) throw InvalidArgument("empty point history");
  const int n = static_cast<int>(points.size());
  const int stride = std::max(1, (n + 1999) / 2000);
  int best = 0, best_count = -1;
  for (int i = 0; i < n; i += stride) {
    const int c = count_within(points, points[i], radius);
    if (c > best_count) {
      best = i;
      best_count = c;
    }
  }
  return {best, best_count};
}

StageSequence run_stages(const ProjectiveState& x0, const RealizedDynamics& dyn, const StageBudget& budget,
                         double bucket_radius, int m_min) {
  if (budget.orbit_len < 1 || budget.max_limit_stages < 0)
    throw InvalidArgument("stage budget must be positive");
  if (!(bucket_radius > 0.0)) throw InvalidArgument("bucket radius must be positive");
  if (m_min < 1) throw InvalidArgument("m_min must be at least 1");
  if (x0.dim() != dyn.dim()) throw DimensionError("x0 dimension does not match the dynamics");

  StageSequence seq;
  RevisitIndex index(dyn.dim());
  auto push = [&](ProjectiveState x, StageKind kind, int stage) {
    const int hit = index.find(x, seq.points);
    seq.points.push_back(std::move(x));
    seq.kinds.push_back(kind);
    seq.stage_of.push_back(stage);
    if (hit >= 0) {
      seq.termination = StageTermination::ExactRevisit;
      seq.revisit_of = hit;
      return false;
    }
    index.insert(seq.points.back(), seq.size() - 1);
    return true;
  };

  ProjectiveState start = x0;
  for (int stage = 0; stage <= budget.max_limit_stages; ++stage) {
    seq.stage_starts.push_back(seq.size());
    if (!push(start, stage == 0 ? StageKind::Orbit : StageKind::Limit, stage)) return seq;
    for (int k = 0; k < budget.orbit_len; ++k)
      if (!push(dyn.image(seq.points.back()), StageKind::Orbit, stage)) return seq;
    if (stage == budget.max_limit_stages) break;

    const auto [centre, visits] = most_revisited(seq.points, bucket_radius);
    if (visits < m_min)
      throw StagnationError("no bucket of radius " + std::to_string(bucket_radius) + " holds " +
                            std::to_string(m_min) + " points after " + std::to_string(seq.size()) +
                            " points; raise orbit_len");
    ProjectiveState next = projective_mean(seq.points, seq.points[centre], bucket_radius);
    int count = count_within(seq.points, next, bucket_radius);
    if (count < m_min) {
      next = seq.points[centre];
      count = visits;
    }
    seq.limits.push_back({bucket_radius, count, centre});
    start = next;
  }
  seq.termination = StageTermination::Budget;
  return seq;
}

bool replay_orbit_stages(const StageSequence& seq, const RealizedDynamics& dyn) {
  for (int k = 0; k + 1 < seq.size(); ++k) {
    if (seq.stage_of[k] != seq.stage_of[k + 1]) continue;
    const ProjectiveState y = dyn.image(seq.points[k]);
    if (y.amplitudes() != seq.points[k + 1].amplitudes()) return false;
  }
  return true;
}

RecurrenceCertificate certify_recurrence(const StageSequence& seq, const RealizedDynamics& dyn,
                                         const std::vector<double>& scales, const CertifyOptions& options) {
  if (seq.size() == 0) throw InvalidArgument("empty stage sequence");
  if (scales.empty()) throw InvalidArgument("no scales given");
  for (std::size_t k = 0; k < scales.size(); ++k) {
    if (!(scales[k] > 0.0)) throw InvalidArgument("scales must be positive");
    if (k > 0 && !(scales[k] < scales[k - 1])) throw InvalidArgument("scales must be strictly decreasing");
  }

  RecurrenceCertificate cert;
  cert.scales = scales;
  cert.base_radius = options.base_radius > 0.0 ? options.base_radius : scales.back() / 2.0;
  const auto [bi, visits] = most_revisited(seq.points, cert.base_radius);
  cert.base_index = bi;
  cert.base_visits = visits;
  cert.base = seq.points[bi];

  const int stage = seq.stage_of[bi];
  const int start = seq.stage_starts[stage];
  const int end = seq.stage_end(stage);
  const int back = std::max(start, bi - std::max(0, options.max_back));

  std::vector<ProjectiveState> succ;
  succ.reserve(end - bi);
  for (int j = bi; j < end; ++j) succ.push_back(successor(seq, dyn, j));

  cert.complete = true;
  cert.nested = true;
  for (std::size_t s = 0; s < scales.size(); ++s) {
    const double eps = scales[s];
    ScaleLoop loop;
    loop.epsilon = eps;

    int jbest = -1, lbest = -1;
    for (int j = bi; j < end && jbest < 0; ++j)
      if (fs_distance(succ[j - bi], seq.points[bi]) < eps) jbest = j, lbest = bi;
    for (int j = bi; j < end && jbest < 0; ++j) {
      for (int l = bi - 1; l >= back; --l)
        if (fs_distance(succ[j - bi], seq.points[l]) < eps) {
          jbest = j;
          lbest = l;
          break;
        }
    }

    long closing = -1;
    if (jbest >= 0) {
      closing = jbest - bi;
      std::vector<ProjectiveState> pts(seq.points.begin() + bi, seq.points.begin() + jbest + 1);
      pts.insert(pts.end(), seq.points.begin() + lbest, seq.points.begin() + bi + 1);
      try {
        loop.chain = StrongChain::build(std::move(pts), dyn, eps);
      } catch (const InvalidArgument&) {
      }
    }

    if (!loop.chain && options.refine_nodes >= 2) {
      const int lo = std::max(start, bi - options.refine_nodes / 2);
      const int hi = std::min(end, lo + options.refine_nodes);
      std::vector<ProjectiveState> nodes{seq.points[bi]};
      for (int i = lo; i < hi; ++i)
        if (i != bi) nodes.push_back(seq.points[i]);
      if (nodes.size() >= 2) {
        const StateNet net = StateNet::from_states(dyn, std::move(nodes), EdgeMode::Dense);
        SearchOptions so;
        so.nontrivial = true;
        so.cost_cap = eps;
        try {
          const PathResult r = min_cost_search(net, 0, 0, so);
          if (r.cost < eps) {
            loop.chain = path_to_chain(net, r, dyn, eps);
            closing = -1;
          }
        } catch (const InfeasibleError&) {
        } catch (const InvalidArgument&) {
        }
      }
    }

    if (loop.chain) {
      loop.found = true;
      loop.cost = loop.chain->total();
      loop.closing_offset = jump_offset(*loop.chain, dyn, cert.base, closing);
      if (s > 0 && !(loop.closing_offset < scales[s - 1])) cert.nested = false;
    } else {
      cert.complete = false;
      cert.nested = false;
    }
    cert.loops.push_back(std::move(loop));
  }
  return cert;
}

TransitiveSetApprox extract_transitive_set(const StageSequence& seq, const RealizedDynamics& dyn, double scale,
                                           int base_index, int size_cap) {
  if (seq.size() == 0) throw InvalidArgument("empty stage sequence");
  if (!(scale > 0.0)) throw InvalidArgument("scale must be positive");
  const double r = scale / 2.0;
  if (base_index < 0) base_index = most_revisited(seq.points, r).first;
  if (base_index >= seq.size()) throw InvalidArgument("base index out of range");

  const ProjectiveState& base = seq.points[base_index];
  const int stage = seq.stage_of[base_index];
  const int start = stage_start_of(seq, base_index);
  const int end = seq.stage_end(stage);
  int first = -1, second = -1;
  for (int i = start; i < end; ++i) {
    if (fs_distance(seq.points[i], base) >= r) continue;
    if (first < 0) {
      first = i;
    } else {
      second = i;
      break;
    }
  }
  if (second < 0) throw InfeasibleError("the base bucket is not revisited within its orbit run");

  TransitiveSetApprox out;
  out.scale = scale;
  out.first_visit = first;
  out.second_visit = second;
  out.members.assign(seq.points.begin() + first, seq.points.begin() + second);
  std::vector<ProjectiveState> images;
  for (int i = first; i < second; ++i) images.push_back(seq.points[i + 1]);

  auto nearest_distance = [&](const ProjectiveState& y) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& m : out.members) best = std::min(best, fs_distance(y, m));
    return best;
  };

  for (std::size_t k = 0; k < out.members.size(); ++k) {
    if (k >= images.size()) images.push_back(dyn.image(out.members[k]));
    if (nearest_distance(images[k]) >= r) {
      if (static_cast<int>(out.members.size()) >= size_cap)
        throw SizeCapError("transitive set closure exceeds " + std::to_string(size_cap) + " members");
      out.members.push_back(images[k]);
    }
  }

  const int n = static_cast<int>(out.members.size());
  out.invariance_gap = 0.0;
  for (int k = 0; k < n; ++k) out.invariance_gap = std::max(out.invariance_gap, nearest_distance(images[k]));
  out.invariant = out.invariance_gap < scale;

  Eigen::MatrixXd edges(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) edges(i, j) = fs_distance(images[i], out.members[j]);
  const CostGraph graph = CostGraph::dense(edges);
  SearchOptions so;
  so.nontrivial = true;
  out.pairwise_costs.resize(n, n);
  for (int i = 0; i < n; ++i) {
    const std::vector<double> row = min_costs_from(graph, i, so);
    for (int j = 0; j < n; ++j) out.pairwise_costs(i, j) = row[j];
  }
  out.max_pairwise = n > 0 ? out.pairwise_costs.maxCoeff() : 0.0;
  out.transitive = out.max_pairwise < scale;
  return out;
}

std::optional<Periodicity> detect_periodicity(const ProjectiveState& x0, const RealizedDynamics& dyn, int horizon) {
  if (horizon < 1) throw InvalidArgument("horizon must be at least 1");
  std::vector<ProjectiveState> orbit{x0};
  RevisitIndex index(dyn.dim());
  index.insert(x0, 0);
  for (int k = 1; k <= horizon; ++k) {
    ProjectiveState y = dyn.image(orbit.back());
    const int hit = index.find(y, orbit);
    if (hit >= 0) {
      Periodicity p;
      p.period = k - hit;
      p.entry = hit;
      p.cycle.assign(orbit.begin() + hit, orbit.end());
      return p;
    }
    index.insert(y, k);
    orbit.push_back(std::move(y));
  }
  return std::nullopt;
}

}  // namespace qbranch
