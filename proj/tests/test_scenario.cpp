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

#include <json.hpp>

#include "qbranch/commands.hpp"
#include "qbranch/error.hpp"
#include "qbranch/scenario.hpp"
#include "support.hpp"

using namespace qbranch;
using nlohmann::json;
using qtest::kPi;

namespace {

const char* kBlank = R"({
  "hilbert_dim": 2,
  "hamiltonian": [[0, 1.9416110387254666], [1.9416110387254666, 0]],
  "observable": "computational",
  "choice_rule": {"kind": "blank-only"},
  "x0": {"basis": 0},
  "steps": 10
})";

std::string message_of(const std::string& text) {
  try {
    parse_scenario(text, "t.json");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

}  // namespace

TEST_CASE("parse diagnostics") {
  const std::string syntax = message_of("{\n  \"hilbert_dim\": 2,\n  oops\n}");
  CHECK(contains(syntax, "line 3"));
  CHECK(contains(syntax, "t.json"));

  CHECK(contains(message_of(R"({"hilbert_dim": 2, "observable": "computational", "colour": 1})"), "unknown key \"colour\""));
  CHECK(contains(message_of(R"({"hilbert_dim": 2, "observable": "computational",
                                "choice_rule": {"kind": "hashed-born"}})"),
                 "/choice_rule"));
  CHECK(contains(message_of(R"({"hilbert_dim": 2, "observable": "computational", "steps": "ten"})"), "/steps"));
  CHECK(contains(message_of(R"({"hilbert_dim": 2, "observable": "computational", "scales": [0.1, 0.2]})"), "/scales"));
  CHECK(contains(message_of(R"({"hilbert_dim": 2, "hamiltonian": [[0, 1], [0, 0]],
                                "observable": "computational"})"),
                 "/hamiltonian"));
  CHECK(contains(message_of(R"({"hilbert_dim": 2, "observable": "computational", "net": {"node_count": 10}})"),
                 "/net"));
  CHECK(contains(message_of(R"({"observable": "computational"})"), "hilbert_dim"));
  CHECK_THROWS_AS(load_scenario("/nonexistent/x.json"), ConfigError);
}

TEST_CASE("state literals") {
  const ProjectiveState plus = parse_state_literal("[1, 1]", 2);
  CHECK(fs_distance(plus.amplitudes(), Vector::Constant(2, 1 / std::sqrt(2.0))) < 1e-15);
  const ProjectiveState i = parse_state_literal("[[1, 0], [0, 1]]", 2);
  CHECK(std::abs(i.amplitudes()[1] - Complex(0, 1 / std::sqrt(2.0))) < 1e-15);
  CHECK(parse_state_literal("{\"basis\": 2}", 3).amplitudes() == ProjectiveState::basis(3, 2).amplitudes());
  CHECK(parse_state_literal("1", 2).amplitudes() == ProjectiveState::basis(2, 1).amplitudes());
  CHECK_THROWS_AS(parse_state_literal("[1, 1, 1]", 2), ConfigError);
  CHECK_THROWS_AS(parse_state_literal("[0, 0]", 2), ConfigError);
  CHECK_THROWS_AS(parse_state_literal("5", 2), ConfigError);
}

TEST_CASE("seed override reaches every stochastic part") {
  Scenario s = parse_scenario(R"({
    "hilbert_dim": 2, "observable": "computational",
    "choice_rule": {"kind": "table", "entries": [], "fallback": {"kind": "hashed-born", "seed": 1}},
    "net": {"seed": 2}
  })");
  s.override_seed(77);
  CHECK(s.net.seed == 77u);
  const auto& t = std::get<TableRule>(s.rule.kind());
  CHECK(std::get<HashedBornRule>(t.fallback).seed == 77u);
}

TEST_CASE("simulate: blank rotation") {
  const Scenario s = parse_scenario(kBlank);
  const CommandReport r = run_command(s, "simulate");
  const json j = json::parse(r.json);
  CHECK(j["itinerary"].size() == 10u);
  for (const auto& l : j["itinerary"]) CHECK(l.get<int>() == 0);
  CHECK(j["compatible"].get<bool>());
  REQUIRE(r.artifacts.size() == 1u);
  CHECK(r.artifacts[0].name == "states.csv");
  int lines = 0;
  for (char c : r.artifacts[0].content) lines += c == '\n';
  CHECK(lines == 12);  // header + 11 states
}

TEST_CASE("simulate: greedy rule on an eigenstate stays put") {
  const Scenario s = parse_scenario(R"({
    "hilbert_dim": 2, "hamiltonian": [[1, 0], [0, -1]], "observable": "computational",
    "choice_rule": {"kind": "born-greedy"}, "x0": {"basis": 1}, "steps": 25
  })");
  const json j = json::parse(run_command(s, "simulate").json);
  for (const auto& l : j["itinerary"]) CHECK(l.get<int>() == 2);
  CHECK(j["label_counts"]["2"].get<int>() == 25);
}

TEST_CASE("commands are deterministic") {
  std::string text = kBlank;
  text.replace(text.find("\"blank-only\"}"), 13, "\"hashed-born\", \"seed\": 7, \"blank_probability\": 0.5}");
  text.replace(text.find("\"steps\": 10"), 11, "\"steps\": 100");
  const Scenario s = parse_scenario(text);
  for (const std::string cmd : {"simulate", "grid-diagnostic"}) {
    const CommandReport a = run_command(s, cmd), b = run_command(parse_scenario(text), cmd);
    CHECK(a.json == b.json);
    REQUIRE(a.artifacts.size() == b.artifacts.size());
    for (std::size_t i = 0; i < a.artifacts.size(); ++i) CHECK(a.artifacts[i].content == b.artifacts[i].content);
  }
}

TEST_CASE("steer report") {
  const Scenario s = parse_scenario(R"({
    "hilbert_dim": 2, "hamiltonian": [[0, 0], [0, 0]], "observable": "computational",
    "x0": 0, "target": [1, 1], "steer": {"ode_steps": 400}
  })");
  const json j = json::parse(run_command(s, "steer").json);
  CHECK(j["cost"].get<double>() == doctest::Approx(kPi / 4).epsilon(1e-12));
  CHECK(j["closed_form"]["fs_error"].get<double>() < 1e-12);
  CHECK(j["ode"]["fs_error"].get<double>() < 1e-8);
  CHECK_THROWS_AS(run_command(s, "teleport"), ConfigError);
}

TEST_CASE("precondition failures surface as library errors") {
  const Scenario s = parse_scenario(R"({
    "hilbert_dim": 2, "hamiltonian": [[0, 0], [0, 0]], "observable": "computational",
    "x0": 0, "target": 1
  })");
  CHECK_THROWS_AS(run_command(s, "steer"), NearOrthogonalError);
}
