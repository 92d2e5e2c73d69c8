#ifndef PROBALIGN_H
#define PROBALIGN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PaStatus {
  PA_STATUS_OK = 0,
  PA_STATUS_NULL_ARGUMENT = 1,
  PA_STATUS_INVALID_UTF8 = 2,
  PA_STATUS_PARSE = 3,
  PA_STATUS_UNSUPPORTED = 4,
  PA_STATUS_INVALID_INPUT = 5,
  PA_STATUS_INVALID_EPSILON = 6,
  PA_STATUS_INDEX_OUT_OF_RANGE = 7,
  PA_STATUS_NO_ALIGNMENT = 8,
  PA_STATUS_BUDGET_EXCEEDED = 9,
  PA_STATUS_TIMEOUT = 10,
  PA_STATUS_IO = 11,
  PA_STATUS_PANIC = 12,
} PaStatus;

typedef enum PaCostKind {
  /**
   * Unit costs on the most probable activity of each event.
   */
  PA_COST_KIND_STANDARD = 0,
  /**
   * Log-probability costs with a trust threshold.
   */
  PA_COST_KIND_WEIGHTED = 1,
} PaCostKind;

typedef enum PaMoveKind {
  PA_MOVE_KIND_SYNC = 0,
  PA_MOVE_KIND_LOG = 1,
  PA_MOVE_KIND_MODEL = 2,
  PA_MOVE_KIND_TAU_MODEL = 3,
} PaMoveKind;

typedef struct PaAlignment PaAlignment;

typedef struct PaLog PaLog;

typedef struct PaNet PaNet;

/**
 * One step of an alignment. `event` is -1 for moves that consume no event.
 */
typedef struct PaMove {
  enum PaMoveKind kind;
  int64_t event;
  double weight;
  double cost;
} PaMove;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. Valid until the
 * next call into this library from the same thread.
 */
const char *pa_last_error_message(void);

/**
 * Library version as a static string.
 */
const char *pa_version(void);

/**
 * # Safety
 * `data` must point to `len` readable bytes; `out` must be writable.
 */
enum PaStatus pa_net_read_pnml(const uint8_t *data, size_t len, struct PaNet **out);

/**
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum PaStatus pa_net_read_pnml_file(const char *path, struct PaNet **out);

/**
 * # Safety
 * `net` must be null or a handle from this library not yet freed.
 */
void pa_net_free(struct PaNet *net);

/**
 * Reads a JSON probabilistic log. Non-zero `renormalize` rescales events
 * whose probabilities do not sum to one.
 *
 * # Safety
 * `data` must point to `len` readable bytes; `out` must be writable.
 */
enum PaStatus pa_log_read_json(const uint8_t *data,
                               size_t len,
                               int32_t renormalize,
                               struct PaLog **out);

/**
 * Reads one case from an activity-by-event CSV matrix.
 *
 * # Safety
 * `data` must point to `len` readable bytes, `case_id` must be a
 * NUL-terminated string and `out` must be writable.
 */
enum PaStatus pa_log_read_csv(const uint8_t *data,
                              size_t len,
                              const char *case_id,
                              int32_t renormalize,
                              struct PaLog **out);

/**
 * Number of cases, or 0 for a null handle.
 *
 * # Safety
 * `log` must be null or a live handle.
 */
size_t pa_log_trace_count(const struct PaLog *log);

/**
 * # Safety
 * `log` must be null or a handle from this library not yet freed.
 */
void pa_log_free(struct PaLog *log);

/**
 * Aligns case `index` of `log` against `net`. `epsilon` is ignored for
 * [`PaCostKind::Standard`]; `max_expansions` of 0 keeps the default budget.
 *
 * # Safety
 * `net` and `log` must be live handles; `out` must be writable.
 */
enum PaStatus pa_align_trace(const struct PaNet *net,
                             const struct PaLog *log,
                             size_t index,
                             enum PaCostKind cost,
                             double epsilon,
                             uint64_t max_expansions,
                             struct PaAlignment **out);

/**
 * Total cost, or NaN for a null handle.
 *
 * # Safety
 * `a` must be null or a live handle.
 */
double pa_alignment_cost(const struct PaAlignment *a);

/**
 * # Safety
 * `a` must be null or a live handle.
 */
size_t pa_alignment_move_count(const struct PaAlignment *a);

/**
 * # Safety
 * `a` must be a live handle; `out` must be writable.
 */
enum PaStatus pa_alignment_move(const struct PaAlignment *a, size_t i, struct PaMove *out);

/**
 * The alignment as a one-case alignment document. Release with
 * [`pa_string_free`].
 *
 * # Safety
 * `a` must be a live handle; `out` must be writable.
 */
enum PaStatus pa_alignment_to_json(const struct PaAlignment *a, char **out);

/**
 * # Safety
 * `a` must be null or a handle from this library not yet freed.
 */
void pa_alignment_free(struct PaAlignment *a);

/**
 * # Safety
 * `s` must be null or a string returned by this library not yet freed.
 */
void pa_string_free(char *s);

/**
 * Cost of a single move with the given weight.
 *
 * # Safety
 * `out` must be writable.
 */
enum PaStatus pa_move_cost(enum PaMoveKind kind,
                           double weight,
                           enum PaCostKind cost,
                           double epsilon,
                           double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PROBALIGN_H */
