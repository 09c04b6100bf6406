/*
 Copyright 2026 The empc Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#ifndef EMPC_EMPC_H
#define EMPC_EMPC_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#if defined(EMPC_BUILDING_LIBRARY)
#define EMPC_API __declspec(dllexport)
#else
#define EMPC_API __declspec(dllimport)
#endif
#else
#define EMPC_API __attribute__((visibility("default")))
#endif

/* Status codes. The first four double as process exit codes. */
typedef enum empc_status {
  EMPC_OK = 0,
  EMPC_ERROR_CONFIG = 1,
  EMPC_ERROR_RUNTIME = 2,
  EMPC_ERROR_CHECK = 3,
  EMPC_ERROR_ARGUMENT = 4
} empc_status;

typedef struct empc_config empc_config;
typedef struct empc_problem empc_problem;
typedef struct empc_log empc_log;
typedef struct empc_result empc_result;

EMPC_API const char *empc_version(void);

/* Message of the last failed call on this thread; "" if none. */
EMPC_API const char *empc_last_error(void);

/* ---- configuration ---------------------------------------------------- */

EMPC_API empc_status empc_config_default(empc_config **out);
EMPC_API empc_status empc_config_load(const char *path, empc_config **out);
EMPC_API empc_status empc_config_parse(const char *json_text,
                                       empc_config **out);
/* "section.key=value"; the value is parsed as JSON when possible. */
EMPC_API empc_status empc_config_set(empc_config *cfg, const char *assignment);
/* Writes the resolved document as JSON. Returns the string owned by cfg,
   valid until the next call on cfg. */
EMPC_API const char *empc_config_json(empc_config *cfg);
EMPC_API void empc_config_free(empc_config *cfg);

/* ---- subcommands ------------------------------------------------------ */

/* Runs steady | openloop | closedloop | sweep | check | plot-export.
   EMPC_OK means the command ran; its own verdict is
   empc_result_exit_code(). `inputs` is used by plot-export only. */
EMPC_API empc_status empc_run(const empc_config *cfg, const char *command,
                              const char *const *inputs, size_t n_inputs,
                              empc_result **out);
EMPC_API int empc_result_exit_code(const empc_result *r);
EMPC_API const char *empc_result_summary(const empc_result *r);
EMPC_API const char *empc_result_report_json(const empc_result *r);
EMPC_API size_t empc_result_output_count(const empc_result *r);
EMPC_API const char *empc_result_output(const empc_result *r, size_t i);
EMPC_API void empc_result_free(empc_result *r);

/* ---- problems --------------------------------------------------------- */

EMPC_API empc_status empc_problem_create(const empc_config *cfg,
                                         empc_problem **out);
EMPC_API void empc_problem_free(empc_problem *p);
EMPC_API int empc_problem_state_dim(const empc_problem *p);
EMPC_API int empc_problem_control_dim(const empc_problem *p);
EMPC_API int empc_problem_horizon(const empc_problem *p);

/* One predictor period from x under constant u. */
EMPC_API empc_status empc_problem_step(const empc_problem *p, const double *x,
                                       const double *u, double *x_next);

EMPC_API empc_status empc_problem_steady_pair(const empc_problem *p,
                                              double *x_s, double *u_s,
                                              double *ell_s, double *residual);

/* Solves the open-loop problem at x0. warm (nullable) and useq_out hold
   m * (N + 1) values, u_0 first. cost_out receives J*. */
EMPC_API empc_status empc_problem_solve(const empc_problem *p,
                                        const double *x0, const double *warm,
                                        double *useq_out, double *cost_out,
                                        int *iterations, int *converged);

EMPC_API empc_status empc_problem_simulate(const empc_problem *p,
                                           empc_log **out);

/* ---- closed-loop logs -------------------------------------------------- */

EMPC_API size_t empc_log_rows(const empc_log *log);
EMPC_API size_t empc_log_columns(const empc_log *log);
EMPC_API const char *empc_log_column_name(const empc_log *log, size_t j);
/* Copies row i (empc_log_columns values) into row. */
EMPC_API empc_status empc_log_row(const empc_log *log, size_t i, double *row);
EMPC_API int empc_log_aborted(const empc_log *log);
EMPC_API const char *empc_log_abort_reason(const empc_log *log);
EMPC_API empc_status empc_log_write_csv(const empc_log *log, const char *path);
/* Tail metrics against the problem's optimal steady pair. */
EMPC_API empc_status empc_log_quasi_steady(const empc_problem *p,
                                           const empc_log *log,
                                           double *eps_ell, double *eps_delta,
                                           int *stationary);
EMPC_API void empc_log_free(empc_log *log);

#ifdef __cplusplus
}
#endif

#endif /* EMPC_EMPC_H */
