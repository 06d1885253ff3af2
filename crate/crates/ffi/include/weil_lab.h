#ifndef WEIL_LAB_H
#define WEIL_LAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum WlStatus {
  WL_STATUS_OK = 0,
  WL_STATUS_NULL_POINTER = 1,
  WL_STATUS_INVALID_ARGUMENT = 2,
  WL_STATUS_NOT_PRIME = 3,
  WL_STATUS_RAMIFIED = 4,
  WL_STATUS_NON_REGULAR = 5,
  WL_STATUS_BUFFER_TOO_SMALL = 6,
  WL_STATUS_NO_EIGENFUNCTION = 7,
  WL_STATUS_DEGENERATE = 8,
  WL_STATUS_INDETERMINATE = 9,
  WL_STATUS_INTERNAL = 10,
  WL_STATUS_PANIC = 11,
} WlStatus;

typedef enum WlTorusKind {
  WL_TORUS_KIND_SPLIT = 0,
  WL_TORUS_KIND_INERT = 1,
  WL_TORUS_KIND_RAMIFIED = 2,
} WlTorusKind;

/**
 * One prime, one cat map, with the canonical intertwiners and the Hecke
 * torus already built.
 */
typedef struct WlLab WlLab;

/**
 * Character decomposition of one realization.
 */
typedef struct WlSpectrum WlSpectrum;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread, NUL-terminated and
 * truncated to `len`. Returns the full length including the terminator, so
 * a call with `len = 0` sizes the buffer.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t wl_last_error_message(char *buf, size_t len);

/**
 * Splitting type of `p` for the cat map [[a, b], [c, d]].
 *
 * # Safety
 * `out` must be null or valid for writes.
 */
enum WlStatus wl_classify(int64_t a,
                          int64_t b,
                          int64_t c,
                          int64_t d,
                          uint32_t p,
                          enum WlTorusKind *out);

/**
 * Builds the laboratory for the cat map [[a, b], [c, d]] at a non-ramified
 * odd prime `p`.
 *
 * # Safety
 * `out` must be null or valid for writes.
 */
enum WlStatus wl_lab_new(int64_t a,
                         int64_t b,
                         int64_t c,
                         int64_t d,
                         uint32_t p,
                         struct WlLab **out);

/**
 * # Safety
 * `lab` must be null or a handle from [`wl_lab_new`] not yet freed.
 */
void wl_lab_free(struct WlLab *lab);

/**
 * # Safety
 * `lab` must be a live handle; `out` valid for writes.
 */
enum WlStatus wl_lab_prime(const struct WlLab *lab, uint32_t *out);

/**
 * # Safety
 * `lab` must be a live handle; `out` valid for writes.
 */
enum WlStatus wl_lab_kind(const struct WlLab *lab, enum WlTorusKind *out);

/**
 * Order of the Hecke torus, which is the number of characters.
 *
 * # Safety
 * `lab` must be a live handle; `out` valid for writes.
 */
enum WlStatus wl_lab_torus_order(const struct WlLab *lab, size_t *out);

/**
 * Writes the p×p Weil operator of g = [[a, b], [c, d]] (mod p, det 1) in the
 * realization σ = (sigma_x, sigma_y). `out` needs 2·p² doubles.
 *
 * # Safety
 * `lab` must be a live handle; `out` must point to `len` writable doubles.
 */
enum WlStatus wl_weil_operator(const struct WlLab *lab,
                               int64_t sigma_x,
                               int64_t sigma_y,
                               int64_t a,
                               int64_t b,
                               int64_t c,
                               int64_t d,
                               double *out,
                               size_t len);

/**
 * Decomposes the realization σ = (sigma_x, sigma_y) into Hecke character
 * spaces.
 *
 * # Safety
 * `lab` must be a live handle; `out` valid for writes.
 */
enum WlStatus wl_spectrum_new(const struct WlLab *lab,
                              int64_t sigma_x,
                              int64_t sigma_y,
                              struct WlSpectrum **out);

/**
 * # Safety
 * `spectrum` must be null or a handle from [`wl_spectrum_new`] not yet freed.
 */
void wl_spectrum_free(struct WlSpectrum *spectrum);

/**
 * Multiplicity of character `k`.
 *
 * # Safety
 * `spectrum` must be a live handle; `out` valid for writes.
 */
enum WlStatus wl_spectrum_multiplicity(const struct WlSpectrum *spectrum, size_t k, size_t *out);

/**
 * Eigenfunction of a multiplicity-one character, normalized to ‖Ψ‖² = p
 * with the first nonzero amplitude real positive. `out` needs 2·p doubles.
 *
 * # Safety
 * `spectrum` must be a live handle; `out` must point to `len` writable
 * doubles.
 */
enum WlStatus wl_spectrum_eigenfunction(const struct WlSpectrum *spectrum,
                                        size_t k,
                                        double *out,
                                        size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WEIL_LAB_H */
