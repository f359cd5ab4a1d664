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

#include "qbranch/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>
#include <string_view>

#include <json.hpp>

#include "qbranch/error.hpp"

namespace qbranch {
namespace {

using nlohmann::json;

class Field {
 public:
  Field(const json& value, std::string path, const std::string& source)
      : value_(value), path_(std::move(path)), source_(source) {}

  const json& value() const { return value_; }
  const std::string& path() const { return path_; }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError("scenario " + source_ + ": field " + (path_.empty() ? "/" : path_) + ": " + msg);
  }

  /// Runs a library constructor, turning its errors into config errors here.
  template <class F>
  auto guarded(F&& f) const {
    try {
      return f();
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      fail(e.what());
    }
  }

  Field operator[](const std::string& key) const { return {value_.at(key), path_ + "/" + key, source_}; }
  Field operator[](std::size_t i) const { return {value_.at(i), path_ + "/" + std::to_string(i), source_}; }
  bool has(const std::string& key) const { return value_.is_object() && value_.contains(key); }
  std::size_t size() const { return value_.size(); }

  void expect_object(std::initializer_list<std::string_view> allowed) const {
    if (!value_.is_object()) fail("expected an object");
    for (const auto& [k, v] : value_.items()) {
      if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) fail("unknown key \"" + k + "\"");
    }
  }
  void expect_array() const {
    if (!value_.is_array()) fail("expected an array");
  }

  double number() const {
    if (!value_.is_number()) fail("expected a number");
    return value_.get<double>();
  }
  double positive() const {
    const double x = number();
    if (!(x > 0.0)) fail("expected a positive number");
    return x;
  }
  long long integer() const {
    if (!value_.is_number_integer()) fail("expected an integer");
    return value_.get<long long>();
  }
  int count(long long lo) const {
    const long long x = integer();
    if (x < lo || x > 1000000000LL) fail("expected an integer >= " + std::to_string(lo));
    return static_cast<int>(x);
  }
  std::uint64_t seed() const {
    if (!value_.is_number_unsigned() && !(value_.is_number_integer() && value_.get<long long>() >= 0))
      fail("expected a non-negative integer seed");
    return value_.get<std::uint64_t>();
  }
  bool boolean() const {
    if (!value_.is_boolean()) fail("expected true or false");
    return value_.get<bool>();
  }
  std::string string() const {
    if (!value_.is_string()) fail("expected a string");
    return value_.get<std::string>();
  }

  Complex complex() const {
    if (value_.is_number()) return {value_.get<double>(), 0.0};
    if (!value_.is_array() || value_.size() != 2 || !value_[0].is_number() || !value_[1].is_number())
      fail("expected a number or an [re, im] pair");
    return {value_[0].get<double>(), value_[1].get<double>()};
  }

  Matrix matrix(int dim) const {
    expect_array();
    if (static_cast<int>(size()) != dim) fail("expected " + std::to_string(dim) + " rows");
    Matrix m(dim, dim);
    for (int r = 0; r < dim; ++r) {
      const Field row = (*this)[r];
      row.expect_array();
      if (static_cast<int>(row.size()) != dim) row.fail("expected " + std::to_string(dim) + " entries");
      for (int c = 0; c < dim; ++c) m(r, c) = row[c].complex();
    }
    return m;
  }

  ProjectiveState state(int dim) const {
    if (value_.is_number_integer() || value_.is_object()) {
      long long k = 0;
      if (value_.is_object()) {
        expect_object({"basis"});
        k = (*this)["basis"].integer();
      } else {
        k = integer();
      }
      if (k < 0 || k >= dim) fail("basis index out of range for dimension " + std::to_string(dim));
      return ProjectiveState::basis(dim, static_cast<int>(k));
    }
    expect_array();
    if (static_cast<int>(size()) != dim) fail("expected " + std::to_string(dim) + " amplitudes");
    Vector v(dim);
    for (int i = 0; i < dim; ++i) v[i] = (*this)[i].complex();
    return guarded([&] { return ProjectiveState(v); });
  }

 private:
  const json& value_;
  std::string path_;
  const std::string& source_;
};

ChoiceRule::Kind parse_simple_rule(const Field& f, bool allow_table, int dim);

ChoiceRule::Kind parse_rule(const Field& f, int dim) { return parse_simple_rule(f, true, dim); }

ChoiceRule::Kind parse_simple_rule(const Field& f, bool allow_table, int dim) {
  if (!f.value().is_object()) f.fail("expected an object with a \"kind\"");
  if (!f.has("kind")) f.fail("missing \"kind\"");
  const std::string kind = f["kind"].string();
  if (kind == "blank-only") {
    f.expect_object({"kind"});
    return BlankOnlyRule{};
  }
  if (kind == "born-greedy") {
    f.expect_object({"kind"});
    return BornGreedyRule{};
  }
  if (kind == "hashed-born") {
    f.expect_object({"kind", "seed", "blank_probability"});
    if (!f.has("seed")) f.fail("hashed-born needs a \"seed\"");
    HashedBornRule r;
    r.seed = f["seed"].seed();
    if (f.has("blank_probability")) {
      r.blank_probability = f["blank_probability"].number();
      if (r.blank_probability < 0.0 || r.blank_probability > 1.0)
        f["blank_probability"].fail("expected a probability in [0, 1]");
    }
    return r;
  }
  if (kind == "table") {
    if (!allow_table) f["kind"].fail("a table fallback cannot itself be a table");
    f.expect_object({"kind", "entries", "match_tolerance", "fallback"});
    TableRule t;
    if (!f.has("entries")) f.fail("table needs \"entries\"");
    const Field entries = f["entries"];
    entries.expect_array();
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const Field e = entries[i];
      e.expect_object({"state", "label"});
      if (!e.has("state") || !e.has("label")) e.fail("entry needs \"state\" and \"label\"");
      t.entries.push_back({e["state"].state(dim), OutcomeLabel{static_cast<int>(e["label"].integer())}});
    }
    if (f.has("match_tolerance")) t.match_tolerance = f["match_tolerance"].positive();
    if (f.has("fallback")) {
      const auto fb = parse_simple_rule(f["fallback"], false, dim);
      std::visit(
          [&](const auto& r) {
            using R = std::decay_t<decltype(r)>;
            if constexpr (!std::is_same_v<R, TableRule>) t.fallback = r;
          },
          fb);
    }
    return t;
  }
  f["kind"].fail("unknown rule kind \"" + kind + "\"");
}

std::vector<double> parse_eigenvalues(const Field& f, std::size_t n) {
  f.expect_array();
  if (f.size() != n) f.fail("expected " + std::to_string(n) + " eigenvalues");
  std::vector<double> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(f[i].number());
  return out;
}

std::vector<double> default_eigenvalues(std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<double>(i + 1);
  return out;
}

Observable parse_observable(const Field& f, int dim) {
  if (f.value().is_string()) {
    if (f.string() != "computational") f.fail("the only named observable is \"computational\"");
    return Observable::computational(dim);
  }
  if (!f.value().is_object()) f.fail("expected \"computational\" or an object");
  if (f.has("projectors")) {
    f.expect_object({"projectors", "eigenvalues"});
    const Field ps = f["projectors"];
    ps.expect_array();
    std::vector<HermitianMatrix> projectors;
    for (std::size_t i = 0; i < ps.size(); ++i) {
      const Matrix m = ps[i].matrix(dim);
      projectors.push_back(ps[i].guarded([&] { return HermitianMatrix(m); }));
    }
    const auto ev = f.has("eigenvalues") ? parse_eigenvalues(f["eigenvalues"], projectors.size())
                                         : default_eigenvalues(projectors.size());
    return f.guarded([&] { return Observable(projectors, ev); });
  }
  if (f.has("eigenbasis")) {
    f.expect_object({"eigenbasis", "partition", "eigenvalues"});
    const Matrix b = f["eigenbasis"].matrix(dim);
    const UnitaryMatrix basis = f["eigenbasis"].guarded([&] { return UnitaryMatrix(b); });
    std::vector<std::vector<int>> partition;
    if (f.has("partition")) {
      const Field p = f["partition"];
      p.expect_array();
      for (std::size_t i = 0; i < p.size(); ++i) {
        p[i].expect_array();
        std::vector<int> group;
        for (std::size_t k = 0; k < p[i].size(); ++k) group.push_back(p[i][k].count(0));
        partition.push_back(group);
      }
    } else {
      for (int k = 0; k < dim; ++k) partition.push_back({k});
    }
    const auto ev = f.has("eigenvalues") ? parse_eigenvalues(f["eigenvalues"], partition.size())
                                         : default_eigenvalues(partition.size());
    return f.guarded([&] { return Observable::from_eigenbasis(basis, partition, ev); });
  }
  f.fail("expected \"projectors\" or \"eigenbasis\"");
}

std::string position_of(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

json parse_json(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::string msg = e.what();
    if (const auto at = msg.find(": "); at != std::string::npos) msg = msg.substr(at + 2);
    throw ConfigError("scenario " + source + ": " + position_of(text, e.byte == 0 ? 0 : e.byte - 1) + ": " + msg);
  }
}

}  // namespace

RealizedDynamics Scenario::dynamics() const {
  if (!observable) throw ConfigError("scenario " + source + ": no observable");
  return RealizedDynamics(hamiltonian ? *hamiltonian : HermitianMatrix::zero(dim), *observable, rule);
}

void Scenario::override_seed(std::uint64_t seed) {
  net.seed = seed;
  ChoiceRule::Kind kind = rule.kind();
  if (auto* h = std::get_if<HashedBornRule>(&kind)) h->seed = seed;
  if (auto* t = std::get_if<TableRule>(&kind))
    if (auto* h = std::get_if<HashedBornRule>(&t->fallback)) h->seed = seed;
  rule = ChoiceRule(std::move(kind));
}

Scenario parse_scenario(const std::string& text, const std::string& source) {
  const json doc = parse_json(text, source);
  const Field root(doc, "", source);
  root.expect_object({"hilbert_dim", "hamiltonian", "observable", "choice_rule", "x0", "target", "steps", "epsilon",
                      "scales", "steer", "net", "pinned", "pairs", "budgets", "recurrence", "grid", "tolerances",
                      "output", "description"});

  Scenario s;
  s.source = source;
  if (!root.has("hilbert_dim")) root.fail("missing \"hilbert_dim\"");
  s.dim = root["hilbert_dim"].count(2);
  if (s.dim > 64) root["hilbert_dim"].fail("dimensions above 64 are not supported");
  const int d = s.dim;

  if (root.has("hamiltonian")) {
    const Matrix h = root["hamiltonian"].matrix(d);
    s.hamiltonian = root["hamiltonian"].guarded([&] { return HermitianMatrix(h); });
  }
  if (!root.has("observable")) root.fail("missing \"observable\"");
  s.observable = parse_observable(root["observable"], d);
  if (root.has("choice_rule")) s.rule = ChoiceRule(parse_rule(root["choice_rule"], d));

  if (root.has("tolerances")) {
    const Field t = root["tolerances"];
    t.expect_object({"table_match"});
    if (t.has("table_match")) {
      ChoiceRule::Kind kind = s.rule.kind();
      if (auto* tab = std::get_if<TableRule>(&kind)) {
        tab->match_tolerance = t["table_match"].positive();
        s.rule = ChoiceRule(std::move(kind));
      } else {
        t["table_match"].fail("only meaningful with a table rule");
      }
    }
  }

  if (root.has("x0")) s.x0 = root["x0"].state(d);
  if (root.has("target")) s.target = root["target"].state(d);
  if (root.has("steps")) s.steps = root["steps"].count(0);
  if (root.has("epsilon")) s.epsilon = root["epsilon"].positive();
  if (root.has("scales")) {
    const Field f = root["scales"];
    f.expect_array();
    if (f.size() == 0) f.fail("expected at least one scale");
    s.scales.clear();
    for (std::size_t i = 0; i < f.size(); ++i) {
      s.scales.push_back(f[i].positive());
      if (i > 0 && !(s.scales[i] < s.scales[i - 1])) f[i].fail("scales must be strictly decreasing");
    }
  }

  if (root.has("steer")) {
    const Field f = root["steer"];
    f.expect_object({"tau0", "tau", "tau1", "ode_steps", "terminal_correction"});
    if (f.has("tau0")) s.steer.tau0 = f["tau0"].number();
    if (f.has("tau")) s.steer.tau = f["tau"].number();
    if (f.has("tau1")) s.steer.tau1 = f["tau1"].number();
    if (f.has("ode_steps")) s.steer.ode_steps = f["ode_steps"].count(0);
    if (f.has("terminal_correction")) s.steer.terminal_correction = f["terminal_correction"].boolean();
  }

  if (root.has("net")) {
    const Field f = root["net"];
    f.expect_object({"node_count", "thinning_radius", "seed", "candidate_factor", "k_nearest", "edges"});
    if (!f.has("seed")) f.fail("a net needs a \"seed\"");
    s.has_net = true;
    s.net.seed = f["seed"].seed();
    if (f.has("node_count")) s.net.node_count = f["node_count"].count(1);
    if (f.has("thinning_radius")) s.net.thinning_radius = f["thinning_radius"].number();
    if (s.net.thinning_radius < 0.0) f["thinning_radius"].fail("expected a non-negative radius");
    if (f.has("candidate_factor")) s.net.candidate_factor = f["candidate_factor"].count(1);
    if (f.has("k_nearest")) s.net.k_nearest = f["k_nearest"].count(1);
    if (f.has("edges")) {
      const std::string e = f["edges"].string();
      if (e == "auto") s.net.edges = EdgeMode::Auto;
      else if (e == "dense") s.net.edges = EdgeMode::Dense;
      else if (e == "sparse") s.net.edges = EdgeMode::Sparse;
      else f["edges"].fail("expected \"auto\", \"dense\" or \"sparse\"");
    }
  }

  if (root.has("pinned")) {
    const Field f = root["pinned"];
    f.expect_array();
    for (std::size_t i = 0; i < f.size(); ++i) s.pinned.push_back(f[i].state(d));
  }
  if (root.has("pairs")) {
    const Field f = root["pairs"];
    f.expect_array();
    for (std::size_t i = 0; i < f.size(); ++i) {
      const Field p = f[i];
      p.expect_array();
      if (p.size() != 2) p.fail("expected a [from, to] pair");
      s.pairs.emplace_back(p[0].count(0), p[1].count(0));
    }
  }

  if (root.has("budgets")) {
    const Field f = root["budgets"];
    f.expect_object({"orbit_len", "max_limit_stages", "horizon", "max_hops", "grid_budget", "size_cap"});
    if (f.has("orbit_len")) s.budgets.orbit_len = f["orbit_len"].count(1);
    if (f.has("max_limit_stages")) s.budgets.max_limit_stages = f["max_limit_stages"].count(0);
    if (f.has("horizon")) s.budgets.horizon = f["horizon"].count(1);
    if (f.has("max_hops")) s.budgets.max_hops = f["max_hops"].count(0);
    if (f.has("grid_budget")) s.budgets.grid_budget = f["grid_budget"].count(1);
    if (f.has("size_cap")) s.budgets.size_cap = f["size_cap"].count(1);
  }
  if (root.has("recurrence")) {
    const Field f = root["recurrence"];
    f.expect_object({"bucket_radius", "m_min", "max_back", "refine_nodes"});
    if (f.has("bucket_radius")) s.recurrence.bucket_radius = f["bucket_radius"].positive();
    if (f.has("m_min")) s.recurrence.m_min = f["m_min"].count(1);
    if (f.has("max_back")) s.recurrence.max_back = f["max_back"].count(0);
    if (f.has("refine_nodes")) s.recurrence.refine_nodes = f["refine_nodes"].count(0);
  }
  if (root.has("grid")) {
    const Field f = root["grid"];
    f.expect_object({"scales"});
    if (f.has("scales")) {
      const Field k = f["scales"];
      k.expect_array();
      s.grid_scales.clear();
      for (std::size_t i = 0; i < k.size(); ++i) s.grid_scales.push_back(k[i].count(1));
    }
  }
  if (root.has("output")) {
    const Field f = root["output"];
    f.expect_object({"directory", "formats"});
    if (f.has("directory")) s.output.directory = f["directory"].string();
    if (f.has("formats")) {
      const Field fm = f["formats"];
      fm.expect_array();
      s.output.json = s.output.csv = false;
      for (std::size_t i = 0; i < fm.size(); ++i) {
        const std::string x = fm[i].string();
        if (x == "json") s.output.json = true;
        else if (x == "csv") s.output.csv = true;
        else fm[i].fail("expected \"json\" or \"csv\"");
      }
    }
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open scenario file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path);
}

ProjectiveState parse_state_literal(const std::string& text, int dim) {
  const json doc = parse_json(text, "<state>");
  static const std::string source = "<state>";
  return Field(doc, "", source).state(dim);
}

}  // namespace qbranch
