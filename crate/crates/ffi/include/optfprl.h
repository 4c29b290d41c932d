#ifndef OPTFPRL_H
#define OPTFPRL_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum OptfprlSetKind {
  /**
   * Centered Euclidean ball; `extent` points to one radius.
   */
  OPTFPRL_SET_KIND_BALL = 0,
  /**
   * Centered axis-aligned box; `extent` points to `dim` half-widths.
   */
  OPTFPRL_SET_KIND_BOX = 1,
} OptfprlSetKind;

/**
 * Result codes.
 */
typedef enum OptfprlStatus {
  OPTFPRL_STATUS_OK = 0,
  OPTFPRL_STATUS_NULL_POINTER = 1,
  OPTFPRL_STATUS_INVALID_ARGUMENT = 2,
  OPTFPRL_STATUS_DIMENSION_MISMATCH = 3,
  OPTFPRL_STATUS_SOLVER_FAILURE = 4,
  OPTFPRL_STATUS_INVARIANT_VIOLATION = 5,
  OPTFPRL_STATUS_IO = 6,
  OPTFPRL_STATUS_INTERNAL = 7,
} OptfprlStatus;

typedef enum OptfprlStrategy {
  OPTFPRL_STRATEGY_AGNOSTIC = 0,
  OPTFPRL_STRATEGY_KNOWN_PATH = 1,
  OPTFPRL_STRATEGY_OBSERVED_PATH = 2,
  OPTFPRL_STRATEGY_RECURSIVE = 3,
} OptfprlStrategy;

/**
 * Opaque learner handle.
 */
typedef struct OptfprlLearner OptfprlLearner;

/**
 * Scalars reported after each step.
 */
typedef struct OptfprlStepInfo {
  /**
   * Slot that was just completed.
   */
  size_t slot;
  double epsilon;
  double sigma_cum;
  double state_norm;
  /**
   * Negative when the strategy does not track deltas.
   */
  double delta;
  bool pruned;
} OptfprlStepInfo;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates a learner over a centered ball or box with linear predictions.
 *
 * `extent` holds the radius (ball) or `dim` half-widths (box).
 * `first_prediction` holds `dim` coefficients. `path_budget` is read only
 * for the known-path strategy. `cadence` must be at least 1.
 *
 * # Safety
 * Pointers must be valid for the stated lengths; `out` must be writable.
 */
enum OptfprlStatus optfprl_learner_new(enum OptfprlSetKind set_kind,
                                       size_t dim,
                                       const double *extent,
                                       enum OptfprlStrategy strategy,
                                       double path_budget,
                                       size_t cadence,
                                       const double *first_prediction,
                                       struct OptfprlLearner **out);

/**
 * Feeds the linear cost of the current slot and the prediction for the
 * next one. `comparator` may be null except for the observed-path
 * strategy. The next iterate is written to `x_next` (`dim` values) and the
 * slot summary to `info`; either may be null.
 *
 * # Safety
 * `learner` must come from [`optfprl_learner_new`]; vector pointers must be
 * valid for `dim` values.
 */
enum OptfprlStatus optfprl_learner_step(struct OptfprlLearner *learner,
                                        size_t dim,
                                        const double *cost,
                                        const double *next_prediction,
                                        const double *comparator,
                                        double *x_next,
                                        struct OptfprlStepInfo *info);

/**
 * Copies the iterate to be played next into `x` (`dim` values).
 *
 * # Safety
 * `learner` must be a live handle and `x` valid for `dim` writes.
 */
enum OptfprlStatus optfprl_learner_iterate(const struct OptfprlLearner *learner,
                                           size_t dim,
                                           double *x);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `learner` must come from [`optfprl_learner_new`] and not be used again.
 */
void optfprl_learner_free(struct OptfprlLearner *learner);

/**
 * Runs one experiment described by `config` (the `key=value` run-file
 * format of the command-line tool) and writes its CSV trace to `out_path`.
 *
 * # Safety
 * Both arguments must be valid NUL-terminated strings.
 */
enum OptfprlStatus optfprl_run_to_csv(const char *config, const char *out_path);

/**
 * Copies the calling thread's last error message into `buf`, truncated and
 * NUL-terminated. Returns the full message length without the terminator.
 *
 * # Safety
 * `buf` must be valid for `len` bytes, or null with `len == 0`.
 */
size_t optfprl_last_error_message(char *buf, size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* OPTFPRL_H */
