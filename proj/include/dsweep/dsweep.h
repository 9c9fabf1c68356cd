/* Copyright 2026 The dsweep Authors
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

/* C interface to libdsweep. Every call returns a dsw_status; on failure the
 * message is available from dsw_last_error() on the calling thread until the
 * next failing call on that thread. Handles are opaque and owned by the
 * caller; strings returned through char** are released with dsw_free_string.
 *
 * Matrices are passed row-major. A weight matrix C is p x d (rows follow the
 * basis f, columns the integrand g). */

#ifndef DSWEEP_DSWEEP_H_
#define DSWEEP_DSWEEP_H_

#include <stddef.h>
#include <stdint.h>

#if defined(DSWEEP_BUILDING_LIBRARY)
#define DSW_API __attribute__((visibility("default")))
#else
#define DSW_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dsw_status {
  DSW_OK = 0,
  DSW_ERR_INVALID_ARGUMENT = 1, /* null pointer, short buffer */
  DSW_ERR_CONFIG = 2,           /* malformed input or incompatible request */
  DSW_ERR_CERTIFICATION = 3,    /* finite model failed a numerical check */
  DSW_ERR_UNSUPPORTED = 4,      /* not defined for this model or schedule */
  DSW_ERR_INTERNAL = 5
} dsw_status;

typedef struct dsw_model dsw_model;
typedef struct dsw_trace dsw_trace;

/* Model capability bits reported by dsw_model_info. */
#define DSW_FLAG_GIBBS 1
#define DSW_FLAG_DATA_AUGMENTATION 2

/* Weight estimation modes for dsw_estimate_weights. */
#define DSW_WEIGHTS_FIXED_GIBBS 0
#define DSW_WEIGHTS_FIXED_BATCH 1
#define DSW_WEIGHTS_PER_KERNEL_BATCH 2

DSW_API const char* dsw_version(void);
DSW_API const char* dsw_last_error(void);
DSW_API const char* dsw_status_name(dsw_status status);
DSW_API void dsw_free_string(char* s);

/* integrand: "x2", "quadratic" or "sum". */
DSW_API dsw_status dsw_model_bvn(double rho, const char* integrand, dsw_model** out);
/* update: "gibbs" | "metropolis"; sweep: "checkerboard" | "raster". */
DSW_API dsw_status dsw_model_ising(int n, double eta, const char* update,
                                   const char* sweep, dsw_model** out);
/* Finite model from a JSON document (text or file). The model is validated. */
DSW_API dsw_status dsw_model_finite_json(const char* json_text, dsw_model** out);
DSW_API dsw_status dsw_model_finite_file(const char* path, dsw_model** out);
DSW_API void dsw_model_destroy(dsw_model* model);

/* Any output pointer may be NULL. */
DSW_API dsw_status dsw_model_info(const dsw_model* model, int* num_kernels,
                                  size_t* state_dim, size_t* g_dim, size_t* f_dim,
                                  int* flags);

/* Runs `steps` draws. init may be NULL (model's initial-state rule, drawn from
 * stream {master_seed, stream_id}); otherwise it holds state_dim values. */
DSW_API dsw_status dsw_run_chain(const dsw_model* model, int random_schedule,
                                 size_t steps, const double* init,
                                 uint64_t master_seed, uint64_t stream_id,
                                 dsw_trace** out);
DSW_API void dsw_trace_destroy(dsw_trace* trace);
DSW_API size_t dsw_trace_size(const dsw_trace* trace);

/* Means are written to out[0..d). */
DSW_API dsw_status dsw_estimate_empirical(const dsw_trace* trace, double* out);
DSW_API dsw_status dsw_estimate_rb(const dsw_trace* trace, double* out);
DSW_API dsw_status dsw_estimate_lwk(const dsw_trace* trace, double* out);
DSW_API dsw_status dsw_estimate_fixed_cv(const dsw_trace* trace, const double* C,
                                         double* out);
/* weights holds K consecutive p x d matrices, C_1 first. */
DSW_API dsw_status dsw_estimate_general_cv(const dsw_trace* trace,
                                           const double* weights, double* out);

/* Estimated weights: one p x d matrix in the fixed modes, K in per-kernel mode
 * (matrix k-1 is the weight used with kernel k). `capacity` counts doubles. */
DSW_API dsw_status dsw_estimate_weights(const dsw_trace* trace, int mode, size_t B,
                                        int force_gibbs_v, double* out,
                                        size_t capacity);

/* Oracle variance report (JSON) for a finite model file. */
DSW_API dsw_status dsw_oracle_report(const char* model_path, char** report_json);

/* Experiment runs from a JSON config file; CSV text is returned. seed may be
 * NULL; workers = 0 keeps the config value. */
DSW_API dsw_status dsw_simulate(const char* config_path, const uint64_t* seed,
                                int force, size_t workers, char** csv);
DSW_API dsw_status dsw_batch_sweep(const char* config_path, const size_t* b_grid,
                                   size_t b_count, int force, size_t workers,
                                   char** csv);

#ifdef __cplusplus
}
#endif

#endif /* DSWEEP_DSWEEP_H_ */
