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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <limits>

#include "qbranch/collapse.hpp"
#include "qbranch/error.hpp"
#include "support.hpp"

using namespace qbranch;
using qtest::kPi;

namespace {

ProjectiveState plus_state() {
  Vector v(2);
  v << 1.0, 1.0;
  return ProjectiveState(v);
}

ProjectiveState real_state(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  int i = 0;
  for (double x : xs) v[i++] = x;
  return ProjectiveState(v);
}

const UnitaryMatrix kI2 = UnitaryMatrix::identity(2);

// Born weights by explicit inner products with the eigenbasis columns.
std::vector<double> weights_oracle(const Vector& u, const Matrix& step, const Matrix& basis,
                                   const std::vector<std::vector<int>>& groups) {
  const Vector w = step * u;
  std::vector<double> out{1.0};
  for (const auto& g : groups) {
    double s = 0.0;
    for (int k : g) s += std::norm(basis.col(k).dot(w));
    out.push_back(s / w.squaredNorm());
  }
  return out;
}

}  // namespace

TEST_CASE("observable construction checks the projection-valued measure") {
  const Observable a = Observable::computational(3);
  CHECK(a.outcomes() == 3);
  CHECK(a.projector(OutcomeLabel{0}) == Matrix::Identity(3, 3));
  Matrix sum = Matrix::Zero(3, 3);
  for (int j = 1; j <= 3; ++j) sum += a.projector(OutcomeLabel{j});
  CHECK(qtest::max_abs_diff(sum, Matrix::Identity(3, 3)) < 1e-15);

  Matrix p0 = Matrix::Zero(2, 2), p1 = Matrix::Zero(2, 2);
  p0(0, 0) = 1;
  p1(1, 1) = 1;
  CHECK_NOTHROW(Observable({HermitianMatrix(p0), HermitianMatrix(p1)}, {-1.0, 1.0}));
  CHECK_THROWS_AS(Observable({HermitianMatrix(p0), HermitianMatrix(p1)}, {1.0, 1.0}), ObservableError);
  CHECK_THROWS_AS(Observable({HermitianMatrix(p0)}, {1.0}), ObservableError);
  CHECK_THROWS_AS(Observable({HermitianMatrix(p0), HermitianMatrix(p0)}, {1.0, 2.0}), ObservableError);
  const Matrix half = 0.5 * Matrix::Identity(2, 2);
  CHECK_THROWS_AS(Observable({HermitianMatrix(half), HermitianMatrix(half)}, {1.0, 2.0}), ObservableError);
  CHECK_THROWS_AS(Observable({HermitianMatrix(p0), HermitianMatrix(p1), HermitianMatrix(Matrix::Zero(2, 2))},
                             {1.0, 2.0, 3.0}),
                  ObservableError);
}

TEST_CASE("as_operator sums eigenvalues times projectors") {
  qtest::Gen gen(31);
  const Matrix basis = gen.unitary(3);
  const Observable a = Observable::from_eigenbasis(UnitaryMatrix(basis), {{0, 2}, {1}}, {2.0, -1.0});
  Matrix ref = 2.0 * (basis.col(0) * basis.col(0).adjoint() + basis.col(2) * basis.col(2).adjoint()) -
               basis.col(1) * basis.col(1).adjoint();
  CHECK(qtest::max_abs_diff(a.as_operator().matrix(), ref) < 1e-12);
}

TEST_CASE("born weights on the listed examples") {
  const Observable a = Observable::computational(2);
  auto w = born_weights(plus_state(), kI2, a);
  REQUIRE(w.size() == 3);
  CHECK(w[0] == 1.0);
  CHECK(w[1] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(w[2] == doctest::Approx(0.5).epsilon(1e-15));
  w = born_weights(ProjectiveState::basis(2, 0), kI2, a);
  CHECK(w[1] == 1.0);
  CHECK(w[2] == 0.0);
  w = born_weights(real_state({std::sqrt(0.75), std::sqrt(0.25)}), kI2, a);
  CHECK(w[1] == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(w[2] == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("born weights match explicit inner products and sum to one") {
  qtest::Gen gen(32);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = gen.integer(2, 6);
    const Matrix basis = gen.unitary(d);
    std::vector<std::vector<int>> groups(gen.integer(1, d));
    for (int k = 0; k < d; ++k) groups[k < static_cast<int>(groups.size()) ? k : gen.integer(0, groups.size() - 1)]
        .push_back(k);
    std::vector<double> ev;
    for (std::size_t j = 0; j < groups.size(); ++j) ev.push_back(static_cast<double>(j));
    const Observable a = Observable::from_eigenbasis(UnitaryMatrix(basis), groups, ev);
    const UnitaryMatrix step(gen.unitary(d));
    const Vector u = gen.vector(d);
    const auto w = born_weights(ProjectiveState(u), step, a);
    const auto ref = weights_oracle(u, step.matrix(), basis, groups);
    double sum = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) {
      CHECK(w[j] == doctest::Approx(ref[j]).epsilon(1e-10));
      if (j > 0) sum += w[j];
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("apply_collapse projects, renormalizes and guards the kernel") {
  const Observable a = Observable::computational(2);
  CHECK(apply_collapse(plus_state(), kI2, a, OutcomeLabel{1}).amplitudes() == ProjectiveState::basis(2, 0).amplitudes());
  CHECK_THROWS_AS(apply_collapse(ProjectiveState::basis(2, 1), kI2, a, OutcomeLabel{1}), ZeroBornWeightError);
  CHECK_THROWS_AS(apply_collapse(plus_state(), kI2, a, OutcomeLabel{3}), InvalidArgument);

  Matrix h(2, 2);
  h << 0, kPi / 4, kPi / 4, 0;  // U = exp(-i pi/4 sigma_x): quarter turn
  const UnitaryMatrix u = evolve(HermitianMatrix(h), 1.0, 0.0);
  const ProjectiveState blank = apply_collapse(ProjectiveState::basis(2, 0), u, a, OutcomeLabel{0});
  const Vector ref = qtest::expm_qubit(h, 1.0) * ProjectiveState::basis(2, 0).amplitudes();
  CHECK(qtest::fs_angle(blank.amplitudes(), ref) < 1e-12);

}

TEST_CASE("collapse images lie in the projector range") {
  qtest::Gen gen(34);
  for (int trial = 0; trial < 100; ++trial) {
    const int d = gen.integer(3, 6);
    const Matrix basis = gen.unitary(d);
    std::vector<std::vector<int>> groups{{0, 1}};
    for (int k = 2; k < d; ++k) groups.push_back({k});
    std::vector<double> ev;
    for (std::size_t j = 0; j < groups.size(); ++j) ev.push_back(0.5 * j);
    const Observable a = Observable::from_eigenbasis(UnitaryMatrix(basis), groups, ev);
    const UnitaryMatrix step(gen.unitary(d));
    const ProjectiveState u(gen.vector(d));
    for (int j = 1; j <= a.outcomes(); ++j) {
      const ProjectiveState f = apply_collapse(u, step, a, OutcomeLabel{j});
      const Matrix p = a.projector(OutcomeLabel{j});
      CHECK((p * f.amplitudes() - f.amplitudes()).norm() < 1e-12);
    }
  }
}

TEST_CASE("choice rules on the listed examples") {
  const Observable a = Observable::computational(2);
  qtest::Gen gen(35);
  const UnitaryMatrix step(gen.unitary(2));
  for (int trial = 0; trial < 20; ++trial) {
    const ProjectiveState u(gen.vector(2));
    const RealizedStep s = step_realized(u, step, a, ChoiceRule(BlankOnlyRule{}));
    CHECK(s.label.value == 0);
    CHECK(qtest::fs_angle(s.state.amplitudes(), step.matrix() * u.amplitudes()) < 1e-12);
  }
  const RealizedStep g = step_realized(ProjectiveState::basis(2, 0), kI2, a, ChoiceRule(BornGreedyRule{}));
  CHECK(g.label.value == 1);
  CHECK(g.state.amplitudes() == ProjectiveState::basis(2, 0).amplitudes());
  // Tie between both outcomes: the lower index wins.
  CHECK(ChoiceRule(BornGreedyRule{}).choose(plus_state(), kI2, a).value == 1);

  const ChoiceRule hashed(HashedBornRule{7, 0.3});
  const RealizedStep h1 = step_realized(plus_state(), kI2, a, hashed);
  const RealizedStep h2 = step_realized(plus_state(), kI2, a, ChoiceRule(HashedBornRule{7, 0.3}));
  CHECK(h1.label == h2.label);
  CHECK(h1.state.amplitudes() == h2.state.amplitudes());
}

TEST_CASE("hashed-born labels are admissible and vary with seed and state") {
  qtest::Gen gen(36);
  const int d = 3;
  const Observable a = Observable::from_eigenbasis(UnitaryMatrix(gen.unitary(d)), {{0, 1}, {2}}, {1.0, 2.0});
  const UnitaryMatrix step(gen.unitary(d));
  std::vector<int> counts(a.outcomes() + 1, 0);
  for (int trial = 0; trial < 2000; ++trial) {
    const ProjectiveState u(gen.vector(d));
    const ChoiceRule g(HashedBornRule{static_cast<std::uint64_t>(trial % 5), 0.25});
    const OutcomeLabel j = g.choose(u, step, a);
    REQUIRE(j.value >= 0);
    REQUIRE(j.value <= a.outcomes());
    CHECK(born_weights(u, step, a)[j.value] > kZeroWeightThreshold);
    ++counts[j.value];
  }
  for (int c : counts) CHECK(c > 100);
  // Labels never land on the kernel of a projector.
  const ProjectiveState e2 = ProjectiveState::basis(2, 1);
  for (std::uint64_t seed = 0; seed < 200; ++seed)
    CHECK(ChoiceRule(HashedBornRule{seed, 0.0}).choose(e2, kI2, Observable::computational(2)).value == 2);
}

TEST_CASE("table rules match entries and fall back") {
  const Observable a = Observable::computational(2);
  TableRule t;
  t.entries.push_back({plus_state(), OutcomeLabel{2}});
  t.fallback = BornGreedyRule{};
  const ChoiceRule g(t);
  CHECK(g.choose(plus_state(), kI2, a).value == 2);
  Vector near(2);
  near << 1.0, 1.0 + 1e-12;
  CHECK(g.choose(ProjectiveState(near), kI2, a).value == 2);
  CHECK(g.choose(real_state({0.8, 0.6}), kI2, a).value == 1);

  TableRule bad;
  bad.entries.push_back({ProjectiveState::basis(2, 0), OutcomeLabel{2}});
  CHECK_THROWS_AS(step_realized(ProjectiveState::basis(2, 0), kI2, a, ChoiceRule(bad)), AdmissibilityError);
}

TEST_CASE("realize_itinerary on the listed examples") {
  const Observable a = Observable::computational(2);
  const ProjectiveState u = plus_state();
  const Realization r = realize_itinerary(u, kI2, a, ChoiceRule(BlankOnlyRule{}), 3);
  REQUIRE(r.itinerary.size() == 3);
  REQUIRE(r.states.size() == 4);
  for (const auto& l : r.itinerary) CHECK(l.value == 0);
  for (const auto& s : r.states) CHECK(s.amplitudes() == u.amplitudes());

  const Realization g = realize_itinerary(ProjectiveState::basis(2, 0), kI2, a, ChoiceRule(BornGreedyRule{}), 2);
  CHECK(g.itinerary == Itinerary{OutcomeLabel{1}, OutcomeLabel{1}});
  for (const auto& s : g.states) CHECK(s.amplitudes() == ProjectiveState::basis(2, 0).amplitudes());
}

TEST_CASE("itineraries are compatible with the shift exactly") {
  qtest::Gen gen(37);
  for (int trial = 0; trial < 50; ++trial) {
    const int d = gen.integer(2, 4);
    const Observable a = Observable::computational(d);
    const UnitaryMatrix step(gen.unitary(d));
    const ChoiceRule g(HashedBornRule{static_cast<std::uint64_t>(trial), 0.4});
    const ProjectiveState u(gen.vector(d));
    const Realization r = realize_itinerary(u, step, a, g, 10);
    const Realization shifted = realize_itinerary(r.states[1], step, a, g, 9);
    for (int n = 0; n < 9; ++n) CHECK(shifted.itinerary[n] == r.itinerary[n + 1]);
    CHECK(verify_compatibility(r, step, a, g));
    // Admissibility along the orbit.
    for (int n = 0; n < 10; ++n) CHECK(born_weights(r.states[n], step, a)[r.itinerary[n].value] > kZeroWeightThreshold);
  }
}

TEST_CASE("skew product steps") {
  const Observable a = Observable::computational(2);
  const SkewPoint p0{{OutcomeLabel{0}, OutcomeLabel{0}, OutcomeLabel{0}}, ProjectiveState::basis(2, 0)};
  const SkewPoint q0 = step_skew(p0, kI2, a);
  CHECK(q0.itinerary.size() == 2);
  CHECK(q0.state.amplitudes() == ProjectiveState::basis(2, 0).amplitudes());

  const SkewPoint bad{{OutcomeLabel{1}}, ProjectiveState::basis(2, 1)};
  CHECK_THROWS_AS(step_skew(bad, kI2, a), ZeroBornWeightError);

  const SkewPoint p1{{OutcomeLabel{1}, OutcomeLabel{0}}, plus_state()};
  const SkewPoint q1 = step_skew(p1, kI2, a);
  CHECK(q1.itinerary == Itinerary{OutcomeLabel{0}});
  CHECK(q1.state.amplitudes() == apply_collapse(plus_state(), kI2, a, OutcomeLabel{1}).amplitudes());
}

TEST_CASE("outcome domains are dense at sampled resolution") {
  qtest::Gen gen(38);
  const UnitaryMatrix step(gen.unitary(3));
  const Observable a = Observable::from_eigenbasis(UnitaryMatrix(gen.unitary(3)), {{0}, {1, 2}}, {0.0, 1.0});
  for (int j = 0; j <= a.outcomes(); ++j) CHECK(domain_fraction(step, a, OutcomeLabel{j}, 10000, 5) == 1.0);
}

TEST_CASE("label density: blank-only and hashed-born") {
  const Observable a = Observable::computational(2);
  const DensityProbe blank = label_density_probe(ChoiceRule(BlankOnlyRule{}), kI2, a, 1000, 3);
  CHECK(blank.labels[0].attained);
  CHECK(blank.labels[0].radius == 0.0);
  CHECK(!blank.labels[1].attained);
  CHECK(blank.labels[1].radius == std::numeric_limits<double>::infinity());

  qtest::Gen gen(39);
  const UnitaryMatrix step(gen.unitary(2));
  const ChoiceRule hashed(HashedBornRule{7, 0.3});
  const DensityProbe coarse = label_density_probe(hashed, step, a, 1000, 4);
  const DensityProbe fine = label_density_probe(hashed, step, a, 10000, 4);
  for (int j = 0; j <= 2; ++j) {
    CHECK(fine.labels[j].attained);
    CHECK(std::isfinite(fine.labels[j].radius));
    CHECK(fine.labels[j].nearest_max < coarse.labels[j].nearest_max);
  }
  CHECK_THROWS_AS(label_density_probe(hashed, step, a, 50, 4), InvalidArgument);
}

TEST_CASE("label density of a table rule matches brute-force nearest neighbours") {
  const Observable a = Observable::computational(3);
  const UnitaryMatrix id = UnitaryMatrix::identity(3);
  const std::vector<ProjectiveState> table_states{real_state({1, 1, 0}), real_state({0, 1, 1}), real_state({1, 0, 1})};
  TableRule t;
  t.entries = {{table_states[0], OutcomeLabel{1}}, {table_states[1], OutcomeLabel{2}}, {table_states[2], OutcomeLabel{3}}};
  t.fallback = BlankOnlyRule{};
  const ChoiceRule g(t);

  qtest::Gen gen(40);
  std::vector<ProjectiveState> samples = table_states;
  for (int i = 0; i < 200; ++i) samples.emplace_back(gen.vector(3));
  std::vector<ProjectiveState> probes;
  for (int i = 0; i < 50; ++i) probes.emplace_back(gen.vector(3));

  const DensityProbe got = label_density_probe(g, id, a, samples, probes);
  // Samples 0..2 carry labels 1..3; the rest are blank.
  std::vector<double> radius(4, 0.0);
  for (const auto& p : probes) {
    double any = qtest::fs_angle(p.amplitudes(), samples[0].amplitudes());
    double blank = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < samples.size(); ++s) {
      const double dist = qtest::fs_angle(p.amplitudes(), samples[s].amplitudes());
      any = std::min(any, dist);
      if (s >= 3) blank = std::min(blank, dist);
    }
    radius[0] = std::max(radius[0], blank - any);
    for (int j = 1; j <= 3; ++j)
      radius[j] = std::max(radius[j], qtest::fs_angle(p.amplitudes(), table_states[j - 1].amplitudes()) - any);
  }
  for (int j = 0; j <= 3; ++j) {
    CHECK(got.labels[j].sample_count == (j == 0 ? 200 : 1));
    CHECK(got.labels[j].radius == doctest::Approx(radius[j]).epsilon(1e-9));
  }
}
