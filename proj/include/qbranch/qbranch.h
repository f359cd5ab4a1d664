/*
 * Copyright 2026 The qbranch Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * C interface to the qbranch library. Scenarios and reports are opaque
 * handles; every fallible call returns a qb_status and leaves a message for
 * qb_last_error() on the calling thread. Strings returned by the library are
 * owned by the handle they came from and stay valid until it is freed.
 */
#ifndef QBRANCH_QBRANCH_H
#define QBRANCH_QBRANCH_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(QBRANCH_BUILDING)
#    define QB_API __declspec(dllexport)
#  else
#    define QB_API __declspec(dllimport)
#  endif
#else
#  define QB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Values 2..4 double as process exit codes. */
typedef enum qb_status {
  QB_OK = 0,
  QB_ERR_CONFIG = 2,       /* malformed scenario or argument */
  QB_ERR_PRECONDITION = 3, /* a mathematical precondition failed */
  QB_ERR_BUDGET = 4,       /* search or size budget exhausted */
  QB_ERR_INTERNAL = 5,
  QB_ERR_NULL = 6          /* null handle or output pointer */
} qb_status;

typedef struct qb_scenario qb_scenario;
typedef struct qb_report qb_report;

QB_API const char* qb_version(void);
QB_API const char* qb_status_string(qb_status status);
/* Message of the last failed call on this thread, "" if none. */
QB_API const char* qb_last_error(void);

QB_API qb_status qb_scenario_load_file(const char* path, qb_scenario** out);
QB_API qb_status qb_scenario_load_string(const char* json, qb_scenario** out);
QB_API void qb_scenario_free(qb_scenario* scenario);

/* Overrides; states use the scenario literal syntax ("1", "{\"basis\":1}",
 * "[[0.6,0],[0.8,0]]"). */
QB_API qb_status qb_scenario_set_seed(qb_scenario* scenario, uint64_t seed);
QB_API qb_status qb_scenario_set_steps(qb_scenario* scenario, int steps);
QB_API qb_status qb_scenario_set_epsilon(qb_scenario* scenario, double epsilon);
QB_API qb_status qb_scenario_set_x0(qb_scenario* scenario, const char* state);
QB_API qb_status qb_scenario_set_target(qb_scenario* scenario, const char* state);

QB_API int qb_scenario_dim(const qb_scenario* scenario);
QB_API const char* qb_scenario_output_dir(const qb_scenario* scenario);
QB_API int qb_scenario_wants_json(const qb_scenario* scenario);
QB_API int qb_scenario_wants_csv(const qb_scenario* scenario);

/* command: simulate, steer, chain-search, recurrence, reversibility or
 * grid-diagnostic. */
QB_API qb_status qb_run(const qb_scenario* scenario, const char* command, qb_report** out);
QB_API qb_status qb_run_simulate(const qb_scenario* scenario, qb_report** out);
QB_API qb_status qb_run_steer(const qb_scenario* scenario, qb_report** out);
QB_API qb_status qb_run_chain_search(const qb_scenario* scenario, qb_report** out);
QB_API qb_status qb_run_recurrence(const qb_scenario* scenario, qb_report** out);
QB_API qb_status qb_run_reversibility(const qb_scenario* scenario, qb_report** out);
QB_API qb_status qb_run_grid_diagnostic(const qb_scenario* scenario, qb_report** out);

QB_API const char* qb_report_command(const qb_report* report);
QB_API const char* qb_report_json(const qb_report* report);
QB_API size_t qb_report_artifact_count(const qb_report* report);
QB_API const char* qb_report_artifact_name(const qb_report* report, size_t index);
QB_API const char* qb_report_artifact_data(const qb_report* report, size_t index);
QB_API void qb_report_free(qb_report* report);

/* Fubini-Study distance between two states given as interleaved
 * (re, im) arrays of length 2 * dim. */
QB_API qb_status qb_fs_distance(const double* a, const double* b, int dim, double* out);

#ifdef __cplusplus
}
#endif

#endif /* QBRANCH_QBRANCH_H */
