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

#include "qbranch/collapse.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <set>
#include <string>

#include "qbranch/sampling.hpp"

namespace qbranch {

namespace {

constexpr double kPvmTol = 1e-10;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double state_hash_uniform(const ProjectiveState& u, std::uint64_t seed) {
  std::uint64_t h = splitmix64(seed ^ static_cast<std::uint64_t>(u.dim()));
  for (Eigen::Index i = 0; i < u.amplitudes().size(); ++i) {
    h = splitmix64(h ^ std::bit_cast<std::uint64_t>(u.amplitudes()[i].real()));
    h = splitmix64(h ^ std::bit_cast<std::uint64_t>(u.amplitudes()[i].imag()));
  }
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

// Norms ||P_j U u|| for j = 1..m, index 0 holds the blank channel (1).
std::vector<double> outcome_norms(const ProjectiveState& u, const UnitaryMatrix& step, const Observable& a) {
  if (u.dim() != step.dim() || u.dim() != a.dim()) throw DimensionError("state, unitary and observable dimensions differ");
  const Vector evolved = step.matrix() * u.amplitudes();
  std::vector<double> norms(a.outcomes() + 1, 1.0);
  for (int j = 1; j <= a.outcomes(); ++j) norms[j] = (a.projector(OutcomeLabel{j}) * evolved).norm();
  return norms;
}

OutcomeLabel choose_greedy(const ProjectiveState& u, const UnitaryMatrix& step, const Observable& a) {
  const auto w = born_weights(u, step, a);
  int best = 1;
  for (int j = 2; j <= a.outcomes(); ++j) {
    if (w[j] > w[best] + 1e-12) best = j;
  }
  return OutcomeLabel{best};
}

OutcomeLabel choose_hashed(const HashedBornRule& rule, const ProjectiveState& u, const UnitaryMatrix& step,
                           const Observable& a) {
  const double r = state_hash_uniform(u, rule.seed);
  if (r < rule.blank_probability) return OutcomeLabel{0};
  const double rescaled = rule.blank_probability < 1.0 ? (r - rule.blank_probability) / (1.0 - rule.blank_probability) : 0.0;
  const auto norms = outcome_norms(u, step, a);
  double total = 0.0;
  for (int j = 1; j <= a.outcomes(); ++j)
    if (norms[j] > kZeroWeightThreshold) total += norms[j] * norms[j];
  double cumulative = 0.0;
  int last_admissible = 0;
  for (int j = 1; j <= a.outcomes(); ++j) {
    if (norms[j] <= kZeroWeightThreshold) continue;
    last_admissible = j;
    cumulative += norms[j] * norms[j] / total;
    if (rescaled < cumulative) return OutcomeLabel{j};
  }
  return OutcomeLabel{last_admissible};
}

template <class Fallback>
OutcomeLabel choose_simple(const Fallback& rule, const ProjectiveState& u, const UnitaryMatrix& step,
                           const Observable& a) {
  if constexpr (std::is_same_v<Fallback, BlankOnlyRule>) {
    return OutcomeLabel{0};
  } else if constexpr (std::is_same_v<Fallback, BornGreedyRule>) {
    return choose_greedy(u, step, a);
  } else {
    return choose_hashed(rule, u, step, a);
  }
}

}  // namespace

Observable::Observable(std::vector<HermitianMatrix> projectors, std::vector<double> eigenvalues)
    : projectors_(std::move(projectors)), eigenvalues_(std::move(eigenvalues)) {
  if (projectors_.empty()) throw ObservableError("observable needs at least one projector");
  if (eigenvalues_.size() != projectors_.size()) {
    throw ObservableError("expected " + std::to_string(projectors_.size()) + " eigenvalues, got " +
                          std::to_string(eigenvalues_.size()));
  }
  const int d = projectors_.front().dim();
  Matrix sum = Matrix::Zero(d, d);
  for (std::size_t j = 0; j < projectors_.size(); ++j) {
    const Matrix& p = projectors_[j].matrix();
    if (p.rows() != d) throw DimensionError("projectors have mismatched dimensions");
    if ((p * p - p).cwiseAbs().maxCoeff() > kPvmTol) {
      throw ObservableError("projector " + std::to_string(j + 1) + " is not idempotent");
    }
    if (p.trace().real() < 0.5) throw ObservableError("projector " + std::to_string(j + 1) + " is zero");
    for (std::size_t k = 0; k < j; ++k) {
      if ((p * projectors_[k].matrix()).cwiseAbs().maxCoeff() > kPvmTol) {
        throw ObservableError("projectors " + std::to_string(k + 1) + " and " + std::to_string(j + 1) +
                              " are not orthogonal");
      }
    }
    sum += p;
  }
  if ((sum - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() > kPvmTol) {
    throw ObservableError("projectors do not sum to the identity");
  }
  std::set<double> distinct(eigenvalues_.begin(), eigenvalues_.end());
  if (distinct.size() != eigenvalues_.size()) throw ObservableError("eigenvalues must be pairwise distinct");
}

Observable Observable::from_eigenbasis(const UnitaryMatrix& basis, const std::vector<std::vector<int>>& partition,
                                       std::vector<double> eigenvalues) {
  const int d = basis.dim();
  std::vector<HermitianMatrix> projectors;
  std::vector<int> seen(d, 0);
  for (const auto& group : partition) {
    Matrix p = Matrix::Zero(d, d);
    for (int k : group) {
      if (k < 0 || k >= d) throw ObservableError("partition index " + std::to_string(k) + " out of range");
      ++seen[k];
      p += basis.matrix().col(k) * basis.matrix().col(k).adjoint();
    }
    projectors.emplace_back(p);
  }
  for (int k = 0; k < d; ++k) {
    if (seen[k] != 1) throw ObservableError("basis column " + std::to_string(k) + " must appear in exactly one group");
  }
  return Observable(std::move(projectors), std::move(eigenvalues));
}

Observable Observable::computational(int dim) {
  std::vector<std::vector<int>> partition;
  std::vector<double> eigenvalues;
  for (int k = 0; k < dim; ++k) {
    partition.push_back({k});
    eigenvalues.push_back(k + 1.0);
  }
  return from_eigenbasis(UnitaryMatrix::identity(dim), partition, eigenvalues);
}

Matrix Observable::projector(OutcomeLabel j) const {
  if (j.value == 0) return Matrix::Identity(dim(), dim());
  if (j.value < 0 || j.value > outcomes()) throw InvalidArgument("outcome label " + std::to_string(j.value) + " out of range");
  return projectors_[j.value - 1].matrix();
}

HermitianMatrix Observable::as_operator() const {
  Matrix a = Matrix::Zero(dim(), dim());
  for (int j = 0; j < outcomes(); ++j) a += eigenvalues_[j] * projectors_[j].matrix();
  return HermitianMatrix(a);
}

ChoiceRule::ChoiceRule(Kind kind) : kind_(std::move(kind)) {
  if (const auto* h = std::get_if<HashedBornRule>(&kind_)) {
    if (!(h->blank_probability >= 0.0 && h->blank_probability <= 1.0)) {
      throw InvalidArgument("blank_probability must lie in [0, 1]");
    }
  }
}

OutcomeLabel ChoiceRule::choose(const ProjectiveState& u, const UnitaryMatrix& step, const Observable& a) const {
  return std::visit(
      [&](const auto& rule) -> OutcomeLabel {
        using R = std::decay_t<decltype(rule)>;
        if constexpr (std::is_same_v<R, TableRule>) {
          for (const auto& entry : rule.entries) {
            if (entry.state.dim() == u.dim() && fs_distance(entry.state, u) <= rule.match_tolerance) return entry.label;
          }
          return std::visit([&](const auto& fb) { return choose_simple(fb, u, step, a); }, rule.fallback);
        } else {
          return choose_simple(rule, u, step, a);
        }
      },
      kind_);
}

std::string ChoiceRule::name() const {
  switch (kind_.index()) {
    case 0: return "blank-only";
    case 1: return "born-greedy";
    case 2: return "hashed-born";
    default: return "table";
  }
}

std::vector<double> born_weights(const ProjectiveState& u, const UnitaryMatrix& step, const Observable& a) {
  auto w = outcome_norms(u, step, a);
  for (std::size_t j = 1; j < w.size(); ++j) w[j] *= w[j];
  return w;
}

ProjectiveState apply_collapse(const ProjectiveState& u, const UnitaryMatrix& step, const Observable& a,
                               OutcomeLabel j) {
  if (u.dim() != step.dim() || u.dim() != a.dim()) throw DimensionError("state, unitary and observable dimensions differ");
  const Vector evolved = step.matrix() * u.amplitudes();
  if (j.value == 0) return ProjectiveState(evolved);
  const Vector projected = a.projector(j) * evolved;
  if (projected.norm() <= kZeroWeightThreshold) {
    throw ZeroBornWeightError("outcome " + std::to_string(j.value) + " has zero Born weight");
  }
  return ProjectiveState(projected);
}

RealizedStep step_realized(const ProjectiveState& u, const UnitaryMatrix& step, const Observable& a,
                           const ChoiceRule& g) {
  const OutcomeLabel j = g.choose(u, step, a);
  if (j.value < 0 || j.value > a.outcomes()) {
    throw AdmissibilityError(g.name() + " rule returned label " + std::to_string(j.value) + " outside {0.." +
                             std::to_string(a.outcomes()) + "}");
  }
  try {
    return {apply_collapse(u, step, a, j), j};
  } catch (const ZeroBornWeightError&) {
    throw AdmissibilityError(g.name() + " rule chose label " + std::to_string(j.value) + " with zero Born weight");
  }
}

Realization realize_itinerary(const ProjectiveState& u, const UnitaryMatrix& step, const Observable& a,
                              const ChoiceRule& g, int steps) {
  if (steps < 1) throw InvalidArgument("realize_itinerary needs at least one step");
  Realization r;
  r.itinerary.reserve(steps);
  r.states.reserve(steps + 1);
  r.states.push_back(u);
  for (int n = 0; n < steps; ++n) {
    auto next = step_realized(r.states.back(), step, a, g);
    r.itinerary.push_back(next.label);
    r.states.push_back(std::move(next.state));
  }
  return r;
}

bool verify_compatibility(const Realization& r, const UnitaryMatrix& step, const Observable& a,
                          const ChoiceRule& g) {
  const int n = static_cast<int>(r.itinerary.size());
  if (n < 2) return true;
  const Realization shifted = realize_itinerary(r.states[1], step, a, g, n - 1);
  for (int k = 0; k < n - 1; ++k) {
    if (shifted.itinerary[k] != r.itinerary[k + 1]) return false;
    if (shifted.states[k + 1].amplitudes() != r.states[k + 2].amplitudes()) return false;
  }
  return true;
}

SkewPoint step_skew(const SkewPoint& p, const UnitaryMatrix& step, const Observable& a) {
  if (p.itinerary.empty()) throw InvalidArgument("skew point needs a non-empty itinerary prefix");
  SkewPoint next{Itinerary(p.itinerary.begin() + 1, p.itinerary.end()), apply_collapse(p.state, step, a, p.itinerary.front())};
  return next;
}

double domain_fraction(const UnitaryMatrix& step, const Observable& a, OutcomeLabel j, int samples,
                       std::uint64_t seed) {
  if (samples < 1) throw InvalidArgument("domain_fraction needs samples >= 1");
  StateSampler sampler(seed);
  int inside = 0;
  for (int s = 0; s < samples; ++s) {
    const auto norms = outcome_norms(sampler.state(a.dim()), step, a);
    if (norms.at(j.value) > kZeroWeightThreshold) ++inside;
  }
  return static_cast<double>(inside) / samples;
}

DensityProbe label_density_probe(const ChoiceRule& g, const UnitaryMatrix& step, const Observable& a, int samples,
                                 std::uint64_t seed, int probes) {
  if (samples < 100) throw InvalidArgument("label_density_probe needs samples >= 100");
  if (probes < 1) throw InvalidArgument("label_density_probe needs at least one probe");
  const int d = a.dim();
  StateSampler sampler(seed);
  std::vector<ProjectiveState> drawn;
  drawn.reserve(samples);
  for (int s = 0; s < samples; ++s) drawn.push_back(sampler.state(d));
  StateSampler probe_sampler(splitmix64(seed ^ 0x70726f6265ULL));
  std::vector<ProjectiveState> probe_set;
  for (int p = 0; p < probes; ++p) probe_set.push_back(probe_sampler.state(d));
  return label_density_probe(g, step, a, drawn, probe_set);
}

DensityProbe label_density_probe(const ChoiceRule& g, const UnitaryMatrix& step, const Observable& a,
                                 const std::vector<ProjectiveState>& drawn,
                                 const std::vector<ProjectiveState>& probe_set) {
  if (drawn.empty() || probe_set.empty()) throw InvalidArgument("label_density_probe needs samples and probes");
  const int samples = static_cast<int>(drawn.size());
  const int probes = static_cast<int>(probe_set.size());
  std::vector<int> labels;
  labels.reserve(samples);
  for (const auto& x : drawn) labels.push_back(g.choose(x, step, a).value);

  DensityProbe out;
  out.samples = samples;
  out.probes = probes;
  const int m = a.outcomes();
  out.labels.resize(m + 1);
  for (int j = 0; j <= m; ++j) {
    out.labels[j].label = OutcomeLabel{j};
    out.labels[j].sample_count = static_cast<int>(std::count(labels.begin(), labels.end(), j));
    out.labels[j].attained = out.labels[j].sample_count > 0;
  }
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> radius(m + 1, 0.0), nearest_max(m + 1, 0.0), nearest_sum(m + 1, 0.0);
  std::vector<double> nearest(m + 1);
  for (const auto& probe : probe_set) {
    std::fill(nearest.begin(), nearest.end(), inf);
    double nearest_any = inf;
    for (int s = 0; s < samples; ++s) {
      const double dist = fs_distance(probe, drawn[s]);
      nearest[labels[s]] = std::min(nearest[labels[s]], dist);
      nearest_any = std::min(nearest_any, dist);
    }
    for (int j = 0; j <= m; ++j) {
      radius[j] = std::max(radius[j], nearest[j] - nearest_any);
      nearest_max[j] = std::max(nearest_max[j], nearest[j]);
      nearest_sum[j] += nearest[j];
    }
  }
  for (int j = 0; j <= m; ++j) {
    if (!out.labels[j].attained) continue;
    out.labels[j].radius = radius[j];
    out.labels[j].nearest_max = nearest_max[j];
    out.labels[j].nearest_mean = nearest_sum[j] / probes;
  }
  return out;
}

RealizedDynamics::RealizedDynamics(HermitianMatrix hamiltonian, Observable observable, ChoiceRule rule)
    : hamiltonian_(std::move(hamiltonian)),
      step_(evolve(hamiltonian_, 1.0, 0.0)),
      observable_(std::move(observable)),
      rule_(std::move(rule)) {
  if (observable_.dim() != hamiltonian_.dim()) throw DimensionError("observable and Hamiltonian dimensions differ");
  HilbertSpace check(hamiltonian_.dim());
  (void)check;
}

}  // namespace qbranch
