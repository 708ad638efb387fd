#ifndef CIRCLE_DENSITY_H
#define CIRCLE_DENSITY_H

/* Generated by cbindgen from crates/ffi. Do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CdStatus {
  CD_STATUS_OK = 0,
  CD_STATUS_NULL_POINTER = 1,
  CD_STATUS_INVALID_ARGUMENT = 2,
  CD_STATUS_IO = 3,
  /**
   * A stream has no more points.
   */
  CD_STATUS_EXHAUSTED = 4,
  /**
   * A verification found at least one violation.
   */
  CD_STATUS_VIOLATION = 5,
  CD_STATUS_INTERNAL = 6,
} CdStatus;

/**
 * Cursor over the points of a sequence spec.
 */
typedef struct CdStream CdStream;

/**
 * Incremental `D_n` / `d_n` tracker.
 */
typedef struct CdTracker CdTracker;

/**
 * One trajectory row. `has_min_gap` is false for the first point, in which
 * case the three min-gap fields are NaN.
 */
typedef struct CdRecord {
  uint64_t n;
  double dispersion;
  double min_gap;
  double n_dispersion;
  double n_min_gap;
  double phi;
  double dispersion_ratio;
  double min_gap_ratio;
  bool has_min_gap;
} CdRecord;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failure on this thread, or null. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *cd_last_error_message(void);

/**
 * `(ln(n + 1) - ln n) / (2 ln 2)`.
 */
enum CdStatus cd_phi(uint64_t n, double *out);

/**
 * Circle distance after reducing both arguments mod 1; NaN for non-finite
 * input.
 */
double cd_rho(double s, double t);

enum CdStatus cd_log_odd_point(uint64_t k, double *out);

enum CdStatus cd_kronecker_point(double alpha, uint64_t k, double *out);

enum CdStatus cd_van_der_corput_point(uint64_t base, uint64_t k, double *out);

/**
 * Opens a stream over the first `n_max` points of `spec` (same syntax as
 * the CLI `--sequence` flag).
 */
enum CdStatus cd_stream_open(const char *spec, uint64_t n_max, struct CdStream **out);

/**
 * Next point, or `Exhausted` once `n_max` points have been produced.
 */
enum CdStatus cd_stream_next(struct CdStream *stream, double *out);

void cd_stream_free(struct CdStream *stream);

struct CdTracker *cd_tracker_new(void);

/**
 * Adds `x` (reduced mod 1) and writes the new row to `out` unless `out` is
 * null.
 */
enum CdStatus cd_tracker_push(struct CdTracker *tracker, double x, struct CdRecord *out);

/**
 * Points pushed so far, duplicates included.
 */
uint64_t cd_tracker_len(const struct CdTracker *tracker);

void cd_tracker_free(struct CdTracker *tracker);

/**
 * Exact log-odd check for every `n <= n_max`. Writes the number of
 * violations (if `violations` is non-null) and returns `Violation` when it
 * is positive.
 */
enum CdStatus cd_verify_example1(uint64_t n_max, uint64_t *violations);

/**
 * Windowed dispersion bound: every window `[n, 2n-1]`, `n <= n_max`, needs a
 * witness. Writes the number of unsatisfied windows to `failed`.
 */
enum CdStatus cd_verify_w1(const char *spec, uint64_t n_max, uint64_t *failed);

/**
 * Windowed minimal-gap bound over `[2n+1, 4n]`, `n <= n_max`.
 */
enum CdStatus cd_verify_w2(const char *spec, uint64_t n_max, uint64_t *failed);

/**
 * Runs the conjecture search. `out_points` must hold `horizon` doubles; the
 * best objective goes to `out_j`.
 */
enum CdStatus cd_search(size_t horizon,
                        uint32_t restarts,
                        uint64_t seed,
                        uint32_t iterations,
                        double initial_step,
                        double decay,
                        size_t floor_n,
                        double *out_points,
                        double *out_j);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CIRCLE_DENSITY_H */
