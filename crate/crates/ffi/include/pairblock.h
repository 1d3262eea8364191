#ifndef PAIRBLOCK_H
#define PAIRBLOCK_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  PB_STATUS_OK = 0,
  PB_STATUS_NULL_POINTER = 1,
  PB_STATUS_INVALID_ARGUMENT = 2,
  PB_STATUS_NUMERICAL = 3,
  PB_STATUS_NO_EMISSION = 4,
  PB_STATUS_PANIC = 5,
} PbStatus;

/**
 * Correlator selector for [`pb_engine_zero_delay`] and [`pb_engine_correlation`].
 */
typedef enum {
  PB_CORRELATOR_G11 = 0,
  PB_CORRELATOR_G22 = 1,
  PB_CORRELATOR_G12 = 2,
  PB_CORRELATOR_G1212 = 3,
} PbCorrelator;

/**
 * Opaque handle.
 */
typedef struct PbEngine PbEngine;

/**
 * Model constants in GHz. A NaN `omega_j_ghz` places the Josephson
 * frequency on resonance.
 */
typedef struct {
  double omega_1_ghz;
  double omega_2_ghz;
  double delta_ghz;
  double e_j_ghz;
  double lambda_1;
  double lambda_2;
  double omega_j_ghz;
  double kappa_ghz;
  double gamma_ghz;
  uint32_t cutoff;
} PbModelParams;

typedef struct {
  double gamma_over_kappa;
  double n1;
  double n2;
  double nbar;
  double rate_per_ns;
  double rate_mhz;
} PbEmission;

typedef struct {
  double ratio;
  double worst_ratio;
  double threshold;
  bool passed;
} PbRwaReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Fills `out` with the default parameter set (resonant drive).
 *
 * # Safety
 * `out` must be null or point to writable memory for one `PbModelParams`.
 */
PbStatus pb_default_params(PbModelParams *out);

/**
 * Builds the master equation and solves for its steady state.
 *
 * # Safety
 * `params` must be null or point to a valid `PbModelParams`; `out` must be
 * null or writable. On success `*out` owns a handle for [`pb_engine_free`].
 */
PbStatus pb_engine_new(const PbModelParams *params, PbEngine **out);

/**
 * Releases an engine. Null is ignored.
 *
 * # Safety
 * `engine` must come from [`pb_engine_new`] and not be used afterwards.
 */
void pb_engine_free(PbEngine *engine);

/**
 * Steady-state occupations and the emission rate `S = κ n̄`.
 *
 * # Safety
 * `engine` must be a live handle or null; `out` must be writable or null.
 */
PbStatus pb_engine_emission(const PbEngine *engine, PbEmission *out);

/**
 * Zero-delay value of a correlator from steady-state moments.
 *
 * # Safety
 * `engine` must be a live handle or null; `out` must be writable or null.
 */
PbStatus pb_engine_zero_delay(const PbEngine *engine, uint32_t which, double *out);

/**
 * Normalized correlator on a grid of `κτ` values, which must start at 0 and
 * increase strictly. Writes `len` values to `out`.
 *
 * # Safety
 * `kappa_tau` must point to `len` readable doubles and `out` to `len`
 * writable doubles; `engine` must be a live handle.
 */
PbStatus pb_engine_correlation(const PbEngine *engine,
                               uint32_t which,
                               const double *kappa_tau,
                               size_t len,
                               double *out);

/**
 * Rotating-wave validity ratio at the default threshold.
 *
 * # Safety
 * `params` must be a valid pointer or null; `out` writable or null.
 */
PbStatus pb_check_rwa(const PbModelParams *params, PbRwaReport *out);

/**
 * Copies the calling thread's last error message into `buf` (NUL
 * terminated, truncated to `len`). Returns the full message length in bytes,
 * excluding the terminator, so a caller can size a buffer with a null `buf`.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t pb_last_error_message(char *buf, size_t len);

/**
 * Library version as a static NUL-terminated string.
 */
const char *pb_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PAIRBLOCK_H */
