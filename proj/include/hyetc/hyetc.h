/*
 * Copyright 2026 The hyetc Authors
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
 * Plain C interface of libhyetc. All objects are opaque handles owned by the
 * caller and released with the matching _free function. Every function that
 * can fail returns a hyetc_status; the message of the last failure on the
 * calling thread is available from hyetc_last_error().
 */

#ifndef HYETC_HYETC_H_
#define HYETC_HYETC_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(HYETC_BUILDING)
#define HYETC_API __declspec(dllexport)
#else
#define HYETC_API __declspec(dllimport)
#endif
#else
#define HYETC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hyetc_status {
  HYETC_OK = 0,
  HYETC_ERR_INVALID_ARGUMENT = 1,
  HYETC_ERR_CONFIG = 2,
  HYETC_ERR_ABORTED = 3,
  HYETC_ERR_MISSING_DEPENDENCY = 4,
  HYETC_ERR_IO = 5,
  HYETC_ERR_INTERNAL = 6
} hyetc_status;

typedef struct hyetc_runspec hyetc_runspec;
typedef struct hyetc_result hyetc_result;

HYETC_API const char* hyetc_version(void);

/* Message of the last failed call on this thread, "" if none. */
HYETC_API const char* hyetc_last_error(void);

/* Defaults: attitude, ours, rho 0, seed 1, horizon 100, output root from
   $HYETC_OUT (else "out"), built-in configuration. */
HYETC_API hyetc_status hyetc_runspec_new(hyetc_runspec** out);
HYETC_API void hyetc_runspec_free(hyetc_runspec* spec);

/* "linear" or "attitude". */
HYETC_API hyetc_status hyetc_runspec_set_scenario(hyetc_runspec* spec, const char* scenario);
/* "ours", "a", "b" or "c". */
HYETC_API hyetc_status hyetc_runspec_set_variant(hyetc_runspec* spec, const char* variant);
HYETC_API hyetc_status hyetc_runspec_set_perturb(hyetc_runspec* spec, double rho);
HYETC_API hyetc_status hyetc_runspec_set_seed(hyetc_runspec* spec, uint64_t seed);
HYETC_API hyetc_status hyetc_runspec_set_horizon(hyetc_runspec* spec, double horizon);
HYETC_API hyetc_status hyetc_runspec_set_out_root(hyetc_runspec* spec, const char* dir);
/* NULL or "" selects the built-in configuration. */
HYETC_API hyetc_status hyetc_runspec_set_config(hyetc_runspec* spec, const char* path);
HYETC_API hyetc_status hyetc_runspec_set_exact_init(hyetc_runspec* spec, int exact);
/* Variant b only; a value <= 0 means "read it from the ours run". */
HYETC_API hyetc_status hyetc_runspec_set_period_b(hyetc_runspec* spec, double period);

/* Solves and writes trace.csv, events.csv and summary.json. The returned
   status mirrors the process exit code (0, 2, 3, 4, ...). *out receives a
   result handle whenever it is non-NULL, also on failure. */
HYETC_API hyetc_status hyetc_run(const hyetc_runspec* spec, hyetc_result** out);

HYETC_API void hyetc_result_free(hyetc_result* result);
HYETC_API int hyetc_result_exit_code(const hyetc_result* result);
HYETC_API const char* hyetc_result_message(const hyetc_result* result);
HYETC_API const char* hyetc_result_out_dir(const hyetc_result* result);
HYETC_API const char* hyetc_result_termination(const hyetc_result* result);
HYETC_API int hyetc_result_total_transmissions(const hyetc_result* result);
/* Returns 1 and stores t* when the run reached the target set, else 0. */
HYETC_API int hyetc_result_t_star(const hyetc_result* result, double* t_star);
/* +inf when no transmission fell into the tail window. */
HYETC_API double hyetc_result_liminf_inter_tx(const hyetc_result* result);
HYETC_API int hyetc_result_pflow_n(const hyetc_result* result);
HYETC_API double hyetc_result_pflow_tau(const hyetc_result* result);
HYETC_API int hyetc_result_max_consecutive_jumps(const hyetc_result* result);

/* Runs a suite file and writes index.json. *exit_code receives the largest
   per-run exit code (0 when all succeeded). */
HYETC_API hyetc_status hyetc_run_suite(const char* suite_path, int* exit_code);

#ifdef __cplusplus
}
#endif

#endif /* HYETC_HYETC_H_ */
