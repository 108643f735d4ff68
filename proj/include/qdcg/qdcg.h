// Copyright 2026 The qdcg Authors
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


/* C interface to the qdcg library. Every object is an opaque handle owned
 * by the caller and released with its _free function. Functions that can
 * fail return a qdcg_status; on failure qdcg_last_error() describes the
 * problem for the calling thread until its next failing call. */
#ifndef QDCG_QDCG_H
#define QDCG_QDCG_H

#include <stddef.h>
#include <stdint.h>

#if defined(QDCG_BUILDING_LIBRARY)
#define QDCG_API __attribute__((visibility("default")))
#else
#define QDCG_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qdcg_status {
  QDCG_OK = 0,
  QDCG_ERR_INVALID_ARGUMENT = 1,
  QDCG_ERR_VALIDATION = 2,
  QDCG_ERR_CAP_EXCEEDED = 3,
  QDCG_ERR_NUMERICAL = 4,
  QDCG_ERR_IO = 5,
  QDCG_ERR_INTERNAL = 6
} qdcg_status;

QDCG_API const char* qdcg_last_error(void);
QDCG_API const char* qdcg_status_name(qdcg_status status);
QDCG_API const char* qdcg_version(void);
QDCG_API void qdcg_string_free(char* s);

/* Discrete measures ------------------------------------------------------ */

typedef struct qdcg_measure qdcg_measure;

QDCG_API qdcg_status qdcg_measure_create(const double* atoms, const double* weights, size_t count,
                                         qdcg_measure** out);
QDCG_API qdcg_status qdcg_measure_read_csv(const char* path, qdcg_measure** out);
/* comments are written as "# " lines before the header. */
QDCG_API qdcg_status qdcg_measure_write_csv(const qdcg_measure* m, const char* path,
                                            const char* const* comments, size_t comment_count);
QDCG_API void qdcg_measure_free(qdcg_measure* m);
QDCG_API size_t qdcg_measure_size(const qdcg_measure* m);
/* Ascending atoms and their weights; valid while m lives. */
QDCG_API const double* qdcg_measure_atoms(const qdcg_measure* m);
QDCG_API const double* qdcg_measure_weights(const qdcg_measure* m);
QDCG_API double qdcg_measure_mean(const qdcg_measure* m);
QDCG_API double qdcg_measure_diameter(const qdcg_measure* m);

QDCG_API qdcg_status qdcg_wasserstein1(const qdcg_measure* a, const qdcg_measure* b, double* out);
QDCG_API qdcg_status qdcg_quantize_discrete(const qdcg_measure* m, unsigned n, qdcg_measure** out);
QDCG_API qdcg_status qdcg_compress(const qdcg_measure* m, unsigned n, qdcg_measure** out);
QDCG_API qdcg_status qdcg_cell_coupling_error(const qdcg_measure* m, unsigned n, double* out);

/* Sources ---------------------------------------------------------------- */

typedef struct qdcg_source qdcg_source;

/* "gaussian:m,s", "uniform:lo,hi", "point:x", "discrete:x1,x2,...",
 * "csv:path". */
QDCG_API qdcg_status qdcg_source_parse(const char* text, qdcg_source** out);
QDCG_API qdcg_status qdcg_source_from_measure(const qdcg_measure* m, qdcg_source** out);
QDCG_API void qdcg_source_free(qdcg_source* s);
QDCG_API qdcg_status qdcg_source_describe(const qdcg_source* s, char** out);

/* tree_json may be NULL; otherwise receives the cell tree as JSON. */
QDCG_API qdcg_status qdcg_quantize_source(const qdcg_source* s, unsigned n, qdcg_measure** out,
                                          char** tree_json);
QDCG_API qdcg_status qdcg_quantization_error(const qdcg_source* s, unsigned n, double* out);

/* Standard normal -------------------------------------------------------- */

QDCG_API double qdcg_conditional_mean_tail(double x);
/* w1_out holds n_max + 1 values, W1 at n = 0..n_max. */
QDCG_API qdcg_status qdcg_gaussian_rate(unsigned n_max, double* w1_out);
/* out holds steps + 1 values. */
QDCG_API qdcg_status qdcg_omega_sequence(unsigned steps, double* out);

/* Graphs ----------------------------------------------------------------- */

typedef struct qdcg_graph qdcg_graph;

QDCG_API qdcg_status qdcg_graph_from_json(const char* text, qdcg_graph** out);
QDCG_API qdcg_status qdcg_graph_from_file(const char* path, qdcg_graph** out);
/* Order statistic k (1-based) of the given sources via bubble sort. */
QDCG_API qdcg_status qdcg_graph_bubble_sort(const qdcg_source* const* sources, size_t count,
                                            unsigned k, qdcg_graph** out);
QDCG_API void qdcg_graph_free(qdcg_graph* g);
QDCG_API size_t qdcg_graph_node_count(const qdcg_graph* g);
QDCG_API const char* qdcg_graph_terminal(const qdcg_graph* g);
QDCG_API qdcg_status qdcg_graph_validate(const qdcg_graph* g);
QDCG_API qdcg_status qdcg_graph_depth(const qdcg_graph* g, unsigned* out);
/* Number of source-to-terminal paths, saturating at UINT64_MAX. */
QDCG_API qdcg_status qdcg_graph_path_count(const qdcg_graph* g, uint64_t* out);

typedef enum qdcg_constant { QDCG_CONSTANT_LOOSE = 0, QDCG_CONSTANT_TIGHT = 1 } qdcg_constant;

typedef struct qdcg_bound_report qdcg_bound_report;

typedef struct qdcg_bound_term {
  const char* source; /* valid while the report lives */
  double quantization_error;
  double quantized_diameter;
  double distortion_sum;
  double term;
} qdcg_bound_term;

QDCG_API qdcg_status qdcg_theorem1_bound(const qdcg_graph* g, unsigned n, qdcg_constant constant,
                                         qdcg_bound_report** out);
QDCG_API void qdcg_bound_free(qdcg_bound_report* r);
QDCG_API double qdcg_bound_total(const qdcg_bound_report* r);
QDCG_API double qdcg_bound_factor(const qdcg_bound_report* r);
QDCG_API size_t qdcg_bound_term_count(const qdcg_bound_report* r);
QDCG_API qdcg_status qdcg_bound_term_at(const qdcg_bound_report* r, size_t i, qdcg_bound_term* out);
QDCG_API qdcg_status qdcg_crude_bound(const qdcg_graph* g, unsigned n, qdcg_constant constant,
                                      double* out);

/* Evaluation ------------------------------------------------------------- */

typedef enum qdcg_eval_mode {
  QDCG_EVAL_EXACT = 0,
  QDCG_EVAL_CQ = 1,
  QDCG_EVAL_MC = 2
} qdcg_eval_mode;

typedef struct qdcg_eval_options {
  qdcg_eval_mode mode;
  int n;            /* quantization level; exact mode: < 0 keeps sources as given */
  uint64_t samples; /* mc */
  uint64_t seed;    /* mc */
  size_t atom_cap;
  const char* node; /* optional marginal, may be NULL */
} qdcg_eval_options;

typedef struct qdcg_node_stats {
  const char* id; /* valid while the result lives */
  size_t joint_atoms;
  size_t support;
  int cut_vertex;
  int compressed;
  double wall_ms;
} qdcg_node_stats;

typedef struct qdcg_eval_result qdcg_eval_result;

QDCG_API void qdcg_eval_options_init(qdcg_eval_options* options);
QDCG_API qdcg_status qdcg_eval(const qdcg_graph* g, const qdcg_eval_options* options,
                               qdcg_eval_result** out);
QDCG_API void qdcg_eval_free(qdcg_eval_result* r);
/* Borrowed from the result. marginal is NULL unless options.node was set. */
QDCG_API const qdcg_measure* qdcg_eval_terminal(const qdcg_eval_result* r);
QDCG_API const qdcg_measure* qdcg_eval_marginal(const qdcg_eval_result* r);
QDCG_API size_t qdcg_eval_stat_count(const qdcg_eval_result* r);
QDCG_API qdcg_status qdcg_eval_stat_at(const qdcg_eval_result* r, size_t i, qdcg_node_stats* out);

/* Euler-Maruyama for geometric Brownian motion --------------------------- */

typedef struct qdcg_gbm {
  double mu;
  double sigma;
  double y0;
  double horizon;
} qdcg_gbm;

typedef struct qdcg_em_record {
  size_t steps;
  unsigned level;
  double w1;
  double bound_fit;
  double diameter;
  size_t support;
  double runtime_ms;
} qdcg_em_record;

/* Law of Y_N at level n. */
QDCG_API qdcg_status qdcg_em_propagate(const qdcg_gbm* model, size_t steps, unsigned n,
                                       qdcg_measure** out);
/* Runs the cells (steps[i], levels[i]) for i < cell_count and writes one
 * record per cell to out. The Monte Carlo reference for each distinct steps
 * value is drawn once. c and c_prime (may be NULL) receive the constants
 * fitted over all cells that produce bound_fit. */
QDCG_API qdcg_status qdcg_em_experiment(const qdcg_gbm* model, const size_t* steps,
                                        const unsigned* levels, size_t cell_count,
                                        uint64_t ref_samples, uint64_t seed, unsigned threads,
                                        qdcg_em_record* out, double* c, double* c_prime);

/* Self check ------------------------------------------------------------- */

typedef void (*qdcg_check_callback)(const char* name, int passed, const char* detail,
                                    double wall_ms, void* user);

/* all_passed may be NULL. */
QDCG_API qdcg_status qdcg_selfcheck(qdcg_check_callback callback, void* user, int* all_passed);

#ifdef __cplusplus
}
#endif

#endif /* QDCG_QDCG_H */
