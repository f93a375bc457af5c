#ifndef QNLAB_H
#define QNLAB_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define QNLAB_OK 0

/**
 * A required pointer was null.
 */
#define QNLAB_ERR_NULL -1

/**
 * A string argument was not valid UTF-8.
 */
#define QNLAB_ERR_UTF8 -2

/**
 * Malformed input: bad JSON, invalid operator or vector, bad parameters.
 */
#define QNLAB_ERR_INVALID -3

/**
 * The computation failed: non-convergence, too few samples, no witness.
 */
#define QNLAB_ERR_NUMERIC -4

/**
 * The command ran but at least one of its checks failed.
 */
#define QNLAB_ERR_VERIFY -5

/**
 * A Rust panic was caught at the boundary.
 */
#define QNLAB_ERR_PANIC -6

/**
 * Precision settings shared by the numeric calls.
 */
typedef struct QnlabContext QnlabContext;

/**
 * A validated operator description.
 */
typedef struct QnlabOperator QnlabOperator;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer is
 * owned by the library and valid until the next call on this thread.
 */
const char *qnlab_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *qnlab_version(void);

/**
 * Creates a context. `mantissa_bits = 0` and `tol <= 0` select the defaults.
 *
 * # Safety
 * `out` must be valid for a pointer write.
 */
int qnlab_context_new(size_t mantissa_bits, double tol, uint64_t seed, struct QnlabContext **out);

/**
 * # Safety
 * `ctx` must be null or a handle from [`qnlab_context_new`] not yet freed.
 */
void qnlab_context_free(struct QnlabContext *ctx);

/**
 * Parses an operator from its JSON description.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` valid for a pointer write.
 */
int qnlab_operator_from_json(const char *json, struct QnlabOperator **out);

/**
 * # Safety
 * `op` must be null or a handle from [`qnlab_operator_from_json`] not yet freed.
 */
void qnlab_operator_free(struct QnlabOperator *op);

/**
 * # Safety
 * `op` must be a live handle; `out` valid for a write.
 */
int qnlab_operator_dim(const struct QnlabOperator *op, size_t *out);

/**
 * `ln ‖(λ−T)^{-1}‖` at `λ = re + i·im`.
 *
 * # Safety
 * `ctx` and `op` must be live handles; `out` valid for a write.
 */
int qnlab_resolvent_log_norm(const struct QnlabContext *ctx,
                             const struct QnlabOperator *op,
                             double re,
                             double im,
                             double *out);

/**
 * Regression estimate of `k_x` on the grid `lambda_max · ratio^j · e^{iθ}`.
 * `vector_json` is a vector description; null means the first basis vector.
 * `stderr_out` may be null.
 *
 * # Safety
 * Handles must be live; strings NUL-terminated; `slope_out` valid for a write.
 */
int qnlab_estimate_k(const struct QnlabContext *ctx,
                     const struct QnlabOperator *op,
                     const char *vector_json,
                     double lambda_max,
                     double ratio,
                     size_t count,
                     double theta,
                     double *slope_out,
                     double *stderr_out);

/**
 * Natural logs of the closed-form lower and upper bounds for
 * `‖(1/t − rA)^{-1}‖`.
 *
 * # Safety
 * `lower` and `upper` must be valid for writes.
 */
int qnlab_shift_norm_bounds(double r, double t, double *lower, double *upper);

/**
 * Runs a CLI command (`"estimate-k"`, `"verify-bounds"`, `"synthesize"`,
 * `"volterra-compare"` or `"sweep"`) on a JSON config and returns its JSON
 * report in `*report_out`, also when the command's checks fail
 * (`QNLAB_ERR_VERIFY`). Release the report with [`qnlab_string_free`].
 *
 * # Safety
 * Strings must be NUL-terminated; `report_out` valid for a pointer write.
 */
int qnlab_run_command(const char *command, const char *config_json, char **report_out);

/**
 * Frees a string returned by the library. Null is ignored.
 *
 * # Safety
 * `s` must be null or a string from this library not yet freed.
 */
void qnlab_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QNLAB_H */
