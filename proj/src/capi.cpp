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

#include "qbranch/qbranch.h"

#include <exception>
#include <new>
#include <string>

#include "qbranch/commands.hpp"
#include "qbranch/error.hpp"
#include "qbranch/scenario.hpp"

struct qb_scenario {
  qbranch::Scenario s;
};

struct qb_report {
  qbranch::CommandReport r;
};

namespace {

thread_local std::string last_error;

qb_status status_of(qbranch::ErrorCategory c) {
  switch (c) {
    case qbranch::ErrorCategory::Config:
      return QB_ERR_CONFIG;
    case qbranch::ErrorCategory::Precondition:
      return QB_ERR_PRECONDITION;
    case qbranch::ErrorCategory::Budget:
      return QB_ERR_BUDGET;
  }
  return QB_ERR_INTERNAL;
}

template <class F>
qb_status guard(F&& f) {
  last_error.clear();
  try {
    f();
    return QB_OK;
  } catch (const qbranch::Error& e) {
    last_error = e.what();
    return status_of(e.category());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
  } catch (const std::exception& e) {
    last_error = e.what();
  } catch (...) {
    last_error = "unknown failure";
  }
  return QB_ERR_INTERNAL;
}

qb_status null_arg(const char* what) {
  last_error = std::string("null ") + what;
  return QB_ERR_NULL;
}

qb_status run_named(const qb_scenario* scenario, const char* command, qb_report** out) {
  if (!scenario) return null_arg("scenario");
  if (!command) return null_arg("command");
  if (!out) return null_arg("output pointer");
  *out = nullptr;
  return guard([&] { *out = new qb_report{qbranch::run_command(scenario->s, command)}; });
}

}  // namespace

extern "C" {

const char* qb_version(void) { return "0.1.0"; }

const char* qb_status_string(qb_status status) {
  switch (status) {
    case QB_OK:
      return "ok";
    case QB_ERR_CONFIG:
      return "configuration error";
    case QB_ERR_PRECONDITION:
      return "precondition violated";
    case QB_ERR_BUDGET:
      return "budget exhausted";
    case QB_ERR_INTERNAL:
      return "internal error";
    case QB_ERR_NULL:
      return "null argument";
  }
  return "unknown status";
}

const char* qb_last_error(void) { return last_error.c_str(); }

qb_status qb_scenario_load_file(const char* path, qb_scenario** out) {
  if (!path) return null_arg("path");
  if (!out) return null_arg("output pointer");
  *out = nullptr;
  return guard([&] { *out = new qb_scenario{qbranch::load_scenario(path)}; });
}

qb_status qb_scenario_load_string(const char* json, qb_scenario** out) {
  if (!json) return null_arg("json");
  if (!out) return null_arg("output pointer");
  *out = nullptr;
  return guard([&] { *out = new qb_scenario{qbranch::parse_scenario(json)}; });
}

void qb_scenario_free(qb_scenario* scenario) { delete scenario; }

qb_status qb_scenario_set_seed(qb_scenario* scenario, uint64_t seed) {
  if (!scenario) return null_arg("scenario");
  return guard([&] { scenario->s.override_seed(seed); });
}

qb_status qb_scenario_set_steps(qb_scenario* scenario, int steps) {
  if (!scenario) return null_arg("scenario");
  return guard([&] {
    if (steps < 0) throw qbranch::ConfigError("steps must be non-negative");
    scenario->s.steps = steps;
  });
}

qb_status qb_scenario_set_epsilon(qb_scenario* scenario, double epsilon) {
  if (!scenario) return null_arg("scenario");
  return guard([&] {
    if (!(epsilon > 0.0)) throw qbranch::ConfigError("epsilon must be positive");
    scenario->s.epsilon = epsilon;
  });
}

qb_status qb_scenario_set_x0(qb_scenario* scenario, const char* state) {
  if (!scenario) return null_arg("scenario");
  if (!state) return null_arg("state");
  return guard([&] { scenario->s.x0 = qbranch::parse_state_literal(state, scenario->s.dim); });
}

qb_status qb_scenario_set_target(qb_scenario* scenario, const char* state) {
  if (!scenario) return null_arg("scenario");
  if (!state) return null_arg("state");
  return guard([&] { scenario->s.target = qbranch::parse_state_literal(state, scenario->s.dim); });
}

int qb_scenario_dim(const qb_scenario* scenario) { return scenario ? scenario->s.dim : 0; }

const char* qb_scenario_output_dir(const qb_scenario* scenario) {
  return scenario ? scenario->s.output.directory.c_str() : "";
}

int qb_scenario_wants_json(const qb_scenario* scenario) { return scenario && scenario->s.output.json; }
int qb_scenario_wants_csv(const qb_scenario* scenario) { return scenario && scenario->s.output.csv; }

qb_status qb_run(const qb_scenario* scenario, const char* command, qb_report** out) {
  return run_named(scenario, command, out);
}

qb_status qb_run_simulate(const qb_scenario* s, qb_report** out) { return run_named(s, "simulate", out); }
qb_status qb_run_steer(const qb_scenario* s, qb_report** out) { return run_named(s, "steer", out); }
qb_status qb_run_chain_search(const qb_scenario* s, qb_report** out) { return run_named(s, "chain-search", out); }
qb_status qb_run_recurrence(const qb_scenario* s, qb_report** out) { return run_named(s, "recurrence", out); }
qb_status qb_run_reversibility(const qb_scenario* s, qb_report** out) { return run_named(s, "reversibility", out); }
qb_status qb_run_grid_diagnostic(const qb_scenario* s, qb_report** out) {
  return run_named(s, "grid-diagnostic", out);
}

const char* qb_report_command(const qb_report* report) { return report ? report->r.command.c_str() : ""; }
const char* qb_report_json(const qb_report* report) { return report ? report->r.json.c_str() : ""; }

size_t qb_report_artifact_count(const qb_report* report) { return report ? report->r.artifacts.size() : 0; }

const char* qb_report_artifact_name(const qb_report* report, size_t index) {
  if (!report || index >= report->r.artifacts.size()) return nullptr;
  return report->r.artifacts[index].name.c_str();
}

const char* qb_report_artifact_data(const qb_report* report, size_t index) {
  if (!report || index >= report->r.artifacts.size()) return nullptr;
  return report->r.artifacts[index].content.c_str();
}

void qb_report_free(qb_report* report) { delete report; }

qb_status qb_fs_distance(const double* a, const double* b, int dim, double* out) {
  if (!a || !b) return null_arg("state buffer");
  if (!out) return null_arg("output pointer");
  return guard([&] {
    if (dim < 2) throw qbranch::DimensionError("dimension must be at least 2");
    qbranch::Vector u(dim), v(dim);
    for (int i = 0; i < dim; ++i) {
      u[i] = {a[2 * i], a[2 * i + 1]};
      v[i] = {b[2 * i], b[2 * i + 1]};
    }
    *out = qbranch::fs_distance(qbranch::ProjectiveState(u), qbranch::ProjectiveState(v));
  });
}

}  // extern "C"
