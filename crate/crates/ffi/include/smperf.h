#ifndef SMPERF_H
#define SMPERF_H

/* Generated by cbindgen; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every API call.
 */
typedef enum SmperfStatus {
  SMPERF_STATUS_OK = 0,
  SMPERF_STATUS_NULL_POINTER = 1,
  SMPERF_STATUS_INVALID_UTF8 = 2,
  SMPERF_STATUS_INVALID_ARGUMENT = 3,
  SMPERF_STATUS_NUMERIC_FAILURE = 4,
} SmperfStatus;

/**
 * Spatial correlation model selector.
 */
typedef enum SmperfCorrelation {
  SMPERF_CORRELATION_NONE = 0,
  SMPERF_CORRELATION_EXPONENTIAL = 1,
} SmperfCorrelation;

/**
 * Union-bound normalization selector.
 */
typedef enum SmperfPrefactor {
  SMPERF_PREFACTOR_PAPER = 0,
  SMPERF_PREFACTOR_CONVENTIONAL = 1,
} SmperfPrefactor;

/**
 * Opaque system handle: channel description plus modulation alphabet.
 */
typedef struct SmperfSystem SmperfSystem;

/**
 * Result of one Monte Carlo BER point.
 */
typedef struct SmperfSimResult {
  double snr_db;
  double ber;
  uint64_t frames;
  uint64_t bit_errors;
  /**
   * Nonzero when the frame cap was hit without observing any error.
   */
  uint8_t below_resolution;
} SmperfSimResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Build a system handle.
 *
 * `constellation` is one of `bpsk`, `qpsk`, `qam8`, `qam16`, `qam32` or
 * `ssk`. `gamma_t` / `gamma_r` are ignored unless `correlation` is
 * exponential. On success `*out` owns the handle.
 *
 * # Safety
 *
 * `constellation` must be a valid NUL-terminated string and `out` a valid
 * pointer.
 */
enum SmperfStatus smperf_system_new(uint32_t n_t,
                                    uint32_t n_r,
                                    const char *constellation,
                                    double k_factor,
                                    enum SmperfCorrelation correlation,
                                    double gamma_t,
                                    double gamma_r,
                                    struct SmperfSystem **out);

/**
 * Release a handle created by [`smperf_system_new`]. A null pointer is a
 * no-op.
 *
 * # Safety
 *
 * `system` must be null or a pointer previously returned by
 * [`smperf_system_new`] that has not been freed.
 */
void smperf_system_free(struct SmperfSystem *system);

/**
 * Analytical union bound on the average bit error probability at one SNR
 * point. Writes the raw bound and the value clipped to 1/2.
 *
 * # Safety
 *
 * `system`, `out_raw` and `out_clipped` must be valid pointers.
 */
enum SmperfStatus smperf_abep_bound(const struct SmperfSystem *system,
                                    double snr_db,
                                    uint32_t quad_nodes,
                                    enum SmperfPrefactor prefactor,
                                    double *out_raw,
                                    double *out_clipped);

/**
 * Monte Carlo BER at one SNR point, stopping at `min_bit_errors` observed
 * errors or `max_frames` simulated frames. Deterministic for a fixed seed
 * regardless of the caller's threading.
 *
 * # Safety
 *
 * `system` and `out` must be valid pointers.
 */
enum SmperfStatus smperf_simulate_point(const struct SmperfSystem *system,
                                        double snr_db,
                                        uint64_t min_bit_errors,
                                        uint64_t max_frames,
                                        uint64_t seed,
                                        struct SmperfSimResult *out);

/**
 * Static description of a status code.
 */
const char *smperf_status_message(enum SmperfStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SMPERF_H */
