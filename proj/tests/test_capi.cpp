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

#include <cmath>
#include <string>

#include "qbranch/qbranch.h"

namespace {

const char* kSteer = R"({
  "hilbert_dim": 2,
  "hamiltonian": [[0, 0], [0, 0]],
  "observable": "computational",
  "x0": 0,
  "target": [1, 1],
  "steps": 4,
  "steer": {"ode_steps": 0},
  "output": {"directory": "somewhere", "formats": ["json"]}
})";

}  // namespace

TEST_CASE("scenario handles") {
  qb_scenario* s = nullptr;
  REQUIRE(qb_scenario_load_string(kSteer, &s) == QB_OK);
  REQUIRE(s != nullptr);
  CHECK(qb_scenario_dim(s) == 2);
  CHECK(std::string(qb_scenario_output_dir(s)) == "somewhere");
  CHECK(qb_scenario_wants_json(s) == 1);
  CHECK(qb_scenario_wants_csv(s) == 0);
  CHECK(qb_scenario_set_steps(s, 7) == QB_OK);
  CHECK(qb_scenario_set_steps(s, -1) == QB_ERR_CONFIG);
  CHECK(qb_scenario_set_x0(s, "[1, 2, 3]") == QB_ERR_CONFIG);
  CHECK(std::string(qb_last_error()).size() > 0);
  CHECK(qb_scenario_set_target(s, "{\"basis\": 1}") == QB_OK);
  qb_scenario_free(s);
  qb_scenario_free(nullptr);

  qb_scenario* bad = reinterpret_cast<qb_scenario*>(0x1);
  CHECK(qb_scenario_load_string("{", &bad) == QB_ERR_CONFIG);
  CHECK(bad == nullptr);
  CHECK(std::string(qb_last_error()).find("line") != std::string::npos);
  CHECK(qb_scenario_load_file("/nonexistent.json", &bad) == QB_ERR_CONFIG);
  CHECK(qb_scenario_load_string(nullptr, &bad) == QB_ERR_NULL);
  CHECK(qb_scenario_load_string(kSteer, nullptr) == QB_ERR_NULL);
}

TEST_CASE("runs and reports") {
  qb_scenario* s = nullptr;
  REQUIRE(qb_scenario_load_string(kSteer, &s) == QB_OK);
  qb_report* r = nullptr;
  REQUIRE(qb_run_steer(s, &r) == QB_OK);
  CHECK(std::string(qb_report_command(r)) == "steer");
  CHECK(std::string(qb_report_json(r)).find("\"cost\"") != std::string::npos);
  REQUIRE(qb_report_artifact_count(r) >= 1);
  CHECK(std::string(qb_report_artifact_name(r, 0)) == "steer_profile.csv");
  CHECK(qb_report_artifact_data(r, 0) != nullptr);
  CHECK(qb_report_artifact_name(r, 99) == nullptr);
  qb_report_free(r);

  REQUIRE(qb_run(s, "simulate", &r) == QB_OK);
  CHECK(std::string(qb_report_command(r)) == "simulate");
  qb_report_free(r);

  CHECK(qb_run(s, "nope", &r) == QB_ERR_CONFIG);
  CHECK(r == nullptr);
  CHECK(qb_run_chain_search(s, &r) == QB_ERR_CONFIG);  // no net section

  REQUIRE(qb_scenario_set_target(s, "1") == QB_OK);
  CHECK(qb_run_steer(s, &r) == QB_ERR_PRECONDITION);
  CHECK(std::string(qb_last_error()).size() > 0);
  qb_scenario_free(s);

  CHECK(qb_run_simulate(nullptr, &r) == QB_ERR_NULL);
  CHECK(std::string(qb_report_json(nullptr)).empty());
  CHECK(qb_report_artifact_count(nullptr) == 0);
}

TEST_CASE("budget failures map to their code") {
  qb_scenario* s = nullptr;
  REQUIRE(qb_scenario_load_string(R"({
    "hilbert_dim": 2, "hamiltonian": [[0, 1.9416110387254666], [1.9416110387254666, 0]],
    "observable": "computational", "x0": 0,
    "budgets": {"grid_budget": 5}, "grid": {"scales": [1, 2, 6]}
  })", &s) == QB_OK);
  qb_report* r = nullptr;
  CHECK(qb_run_grid_diagnostic(s, &r) == QB_ERR_BUDGET);
  qb_scenario_free(s);
}

TEST_CASE("free helpers") {
  const double a[4] = {1, 0, 0, 0};
  const double b[4] = {1, 0, 0, 1};
  double d = -1;
  CHECK(qb_fs_distance(a, b, 2, &d) == QB_OK);
  CHECK(d == doctest::Approx(std::atan(1.0)).epsilon(1e-15));
  CHECK(qb_fs_distance(a, b, 2, nullptr) == QB_ERR_NULL);
  const double z[4] = {0, 0, 0, 0};
  CHECK(qb_fs_distance(a, z, 2, &d) == QB_ERR_PRECONDITION);
  CHECK(std::string(qb_version()) == "0.1.0");
  CHECK(std::string(qb_status_string(QB_ERR_BUDGET)).size() > 0);
  CHECK(std::string(qb_status_string(QB_OK)).size() > 0);
}
