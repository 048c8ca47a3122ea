#ifndef TESALOCS_H
#define TESALOCS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum TesalocsLocalMethod {
  TESALOCS_LOCAL_METHOD_BFGS = 0,
  TESALOCS_LOCAL_METHOD_CG = 1,
  TESALOCS_LOCAL_METHOD_PSO = 2,
  TESALOCS_LOCAL_METHOD_SPSA = 3,
  TESALOCS_LOCAL_METHOD_NONE = 4,
} TesalocsLocalMethod;

typedef enum TesalocsOptimizer {
  TESALOCS_OPTIMIZER_PLAIN_SGD = 0,
  TESALOCS_OPTIMIZER_ADAPTIVE_MOMENT = 1,
} TesalocsOptimizer;

typedef enum TesalocsStatus {
  TESALOCS_STATUS_OK = 0,
  TESALOCS_STATUS_INVALID_ARGUMENT = 1,
  TESALOCS_STATUS_INDEX_OUT_OF_RANGE = 2,
  TESALOCS_STATUS_DIMENSION_MISMATCH = 3,
  TESALOCS_STATUS_DEGENERATE_MODEL = 4,
  TESALOCS_STATUS_MODEL_CORRUPTION = 5,
  TESALOCS_STATUS_BUDGET_EXHAUSTED = 6,
  TESALOCS_STATUS_EMPTY_ELITES = 7,
  TESALOCS_STATUS_UNKNOWN_FUNCTION = 8,
  TESALOCS_STATUS_IO = 9,
  TESALOCS_STATUS_SERIALIZATION = 10,
  TESALOCS_STATUS_NULL_POINTER = 11,
  TESALOCS_STATUS_PANIC = 12,
} TesalocsStatus;

/**
 * Opaque tensor-train model.
 */
typedef struct TesalocsModel TesalocsModel;

/**
 * Opaque search box with its grid.
 */
typedef struct TesalocsSpace TesalocsSpace;

typedef struct TesalocsLearnerConfig {
  double learning_rate;
  size_t steps_per_iteration;
  double clamp_floor;
  enum TesalocsOptimizer optimizer;
} TesalocsLearnerConfig;

/**
 * Settings for [`tesalocs_minimize`]. `max_evals_per_candidate == 0`
 * selects the budget-derived default.
 */
typedef struct TesalocsRunConfig {
  size_t budget;
  size_t rank;
  size_t batch;
  size_t elite;
  struct TesalocsLearnerConfig learner;
  enum TesalocsLocalMethod method;
  size_t max_evals_per_candidate;
  uint64_t seed;
} TesalocsRunConfig;

/**
 * Objective callback: `f(x, dim, user_data)`.
 */
typedef double (*TesalocsObjective)(const double*, size_t, void*);

/**
 * Best point of a finished run. `x` must hold `dim` values.
 */
typedef struct TesalocsRunResult {
  double *x;
  size_t dim;
  double value;
  size_t evaluations;
  size_t iterations;
} TesalocsRunResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the calling thread's last error message into `buf` (always
 * NUL-terminated when `len > 0`) and returns the full message length in
 * bytes, excluding the terminator.
 *
 * # Safety
 * `buf` must be writable for `len` bytes, or NULL with `len == 0`.
 */
size_t tesalocs_last_error_message(char *buf, size_t len);

/**
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void tesalocs_string_free(char *s);

struct TesalocsLearnerConfig tesalocs_learner_config_default(void);

struct TesalocsRunConfig tesalocs_run_config_default(void);

/**
 * Random non-negative model with `d` modes of size `n` and inner ranks `r`.
 *
 * # Safety
 * `out` must be a valid pointer to write the handle to.
 */
enum TesalocsStatus tesalocs_model_new_random(size_t d,
                                              size_t n,
                                              size_t r,
                                              uint64_t seed,
                                              struct TesalocsModel **out);

/**
 * # Safety
 * `model` must be NULL or a live handle from this library.
 */
void tesalocs_model_free(struct TesalocsModel *model);

/**
 * # Safety
 * `model` must be a live handle and `out` writable.
 */
enum TesalocsStatus tesalocs_model_ndim(const struct TesalocsModel *model, size_t *out);

/**
 * Unnormalized value at a multi-index of length `d`.
 *
 * # Safety
 * `idx` must hold `d` values; `model` live; `out` writable.
 */
enum TesalocsStatus tesalocs_model_eval(const struct TesalocsModel *model,
                                        const size_t *idx,
                                        size_t d,
                                        double *out);

/**
 * Normalized log-probability of a multi-index.
 *
 * # Safety
 * As [`tesalocs_model_eval`].
 */
enum TesalocsStatus tesalocs_model_log_prob(const struct TesalocsModel *model,
                                            const size_t *idx,
                                            size_t d,
                                            double *out);

/**
 * # Safety
 * `model` live; `out` writable.
 */
enum TesalocsStatus tesalocs_model_log_mass(const struct TesalocsModel *model, double *out);

/**
 * Draws `k` multi-indices into `out`, row-major `k x d`.
 *
 * # Safety
 * `out` must be writable for `k * d` values.
 */
enum TesalocsStatus tesalocs_model_sample(const struct TesalocsModel *model,
                                          size_t k,
                                          uint64_t seed,
                                          size_t *out,
                                          size_t out_len);

/**
 * One learner update toward `count` elite multi-indices, row-major
 * `count x d`. Optimizer state does not persist between calls.
 *
 * # Safety
 * `elites` must hold `count * d` values; `cfg` must be readable.
 */
enum TesalocsStatus tesalocs_model_update(struct TesalocsModel *model,
                                          const size_t *elites,
                                          size_t count,
                                          size_t d,
                                          const struct TesalocsLearnerConfig *cfg);

/**
 * Serializes the model; free the result with [`tesalocs_string_free`].
 *
 * # Safety
 * `model` live; `out` writable.
 */
enum TesalocsStatus tesalocs_model_to_json(const struct TesalocsModel *model, char **out);

/**
 * # Safety
 * `json` must be a NUL-terminated string; `out` writable.
 */
enum TesalocsStatus tesalocs_model_from_json(const char *json, struct TesalocsModel **out);

/**
 * # Safety
 * `model` live; `path` NUL-terminated.
 */
enum TesalocsStatus tesalocs_model_save(const struct TesalocsModel *model, const char *path);

/**
 * # Safety
 * `path` NUL-terminated; `out` writable.
 */
enum TesalocsStatus tesalocs_model_load(const char *path, struct TesalocsModel **out);

/**
 * Box `[lower_i, upper_i]` with `nodes_i` grid nodes per dimension.
 *
 * # Safety
 * The three arrays must hold `d` values; `out` writable.
 */
enum TesalocsStatus tesalocs_space_new(size_t d,
                                       const double *lower,
                                       const double *upper,
                                       const size_t *nodes,
                                       struct TesalocsSpace **out);

/**
 * Same box and node count in every dimension.
 *
 * # Safety
 * `out` writable.
 */
enum TesalocsStatus tesalocs_space_uniform(size_t d,
                                           double lower,
                                           double upper,
                                           size_t nodes,
                                           struct TesalocsSpace **out);

/**
 * # Safety
 * `space` must be NULL or a live handle from this library.
 */
void tesalocs_space_free(struct TesalocsSpace *space);

/**
 * Multi-index to point.
 *
 * # Safety
 * `idx` and `x` must hold `d` values.
 */
enum TesalocsStatus tesalocs_space_to_point(const struct TesalocsSpace *space,
                                            const size_t *idx,
                                            size_t d,
                                            double *x);

/**
 * Point to nearest multi-index (clamped into the grid).
 *
 * # Safety
 * `x` and `idx` must hold `d` values.
 */
enum TesalocsStatus tesalocs_space_to_index(const struct TesalocsSpace *space,
                                            const double *x,
                                            size_t d,
                                            size_t *idx);

size_t tesalocs_benchmark_count(void);

/**
 * Static name of benchmark `i`, or NULL when out of range. Do not free.
 */
const char *tesalocs_benchmark_name(size_t i);

/**
 * # Safety
 * `name` NUL-terminated; `x` holds `d` values; `out` writable.
 */
enum TesalocsStatus tesalocs_benchmark_eval(const char *name,
                                            const double *x,
                                            size_t d,
                                            double *out);

/**
 * Default box and known minimum at dimension `d`.
 *
 * # Safety
 * `name` NUL-terminated; the out pointers writable.
 */
enum TesalocsStatus tesalocs_benchmark_info(const char *name,
                                            size_t d,
                                            double *lower,
                                            double *upper,
                                            double *min_value);

/**
 * Minimizes `f` over `space` with learned starting points.
 *
 * # Safety
 * `f` must be a valid function pointer that does not unwind; `space`, `cfg`
 * and `result` valid, with `result->x` writable for `result->dim` values.
 */
enum TesalocsStatus tesalocs_minimize(TesalocsObjective f,
                                      void *user_data,
                                      const struct TesalocsSpace *space,
                                      const struct TesalocsRunConfig *cfg,
                                      struct TesalocsRunResult *result);

/**
 * Same protocol with uniform random starting points.
 *
 * # Safety
 * As [`tesalocs_minimize`].
 */
enum TesalocsStatus tesalocs_minimize_baseline(TesalocsObjective f,
                                               void *user_data,
                                               const struct TesalocsSpace *space,
                                               const struct TesalocsRunConfig *cfg,
                                               struct TesalocsRunResult *result);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TESALOCS_H */
