#ifndef TOEPLAB_H
#define TOEPLAB_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ToeplabStatus {
  TOEPLAB_STATUS_OK = 0,
  TOEPLAB_STATUS_NULL_POINTER = 1,
  TOEPLAB_STATUS_INVALID_INPUT = 2,
  TOEPLAB_STATUS_NUMERICAL = 3,
  TOEPLAB_STATUS_PANIC = 4,
} ToeplabStatus;

/**
 * Opaque symbol handle.
 */
typedef struct ToeplabSymbol ToeplabSymbol;

/**
 * det = exp(log_modulus + i phase), or 0 when exact_zero is nonzero.
 */
typedef struct ToeplabLogDet {
  double log_modulus;
  double phase;
  int32_t exact_zero;
} ToeplabLogDet;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread (empty after success).
 * The pointer stays valid until the next call on the same thread.
 */
const char *toeplab_last_error(void);

/**
 * Builds a named builtin symbol. `keys`, `re` and `im` hold `count`
 * parameters (complex values as re + i im).
 *
 * # Safety
 * The arrays must hold `count` valid entries and `out` must be writable.
 */
enum ToeplabStatus toeplab_symbol_builtin(const char *name,
                                          const char *const *keys,
                                          const double *re,
                                          const double *im,
                                          size_t count,
                                          struct ToeplabSymbol **out);

/**
 * Parses a key=value symbol description.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` writable.
 */
enum ToeplabStatus toeplab_symbol_parse(const char *text, struct ToeplabSymbol **out);

/**
 * Releases a symbol; null is ignored.
 *
 * # Safety
 * `sym` must come from this library and not be used afterwards.
 */
void toeplab_symbol_free(struct ToeplabSymbol *sym);

/**
 * Fourier coefficient phi_k.
 *
 * # Safety
 * `sym` must be a live handle; `re` and `im` writable.
 */
enum ToeplabStatus toeplab_symbol_coeff(const struct ToeplabSymbol *sym,
                                        int64_t k,
                                        double *re,
                                        double *im);

/**
 * Exact D_n. `extended` nonzero selects double-double arithmetic.
 *
 * # Safety
 * `sym` must be a live handle and `out` writable.
 */
enum ToeplabStatus toeplab_det(const struct ToeplabSymbol *sym,
                               size_t n,
                               int32_t extended,
                               struct ToeplabLogDet *out);

/**
 * Large-n prediction for D_n, summed over all minimising representations.
 *
 * # Safety
 * `sym` must be a live handle and `out` writable.
 */
enum ToeplabStatus toeplab_predict(const struct ToeplabSymbol *sym,
                                   size_t n,
                                   struct ToeplabLogDet *out);

/**
 * Ising spin-spin correlation at distance n for equal couplings with
 * Onsager modulus `k_ons`; `diagonal` nonzero selects the diagonal.
 *
 * # Safety
 * `out` must be writable.
 */
enum ToeplabStatus toeplab_ising_correlation(double k_ons, int32_t diagonal, size_t n, double *out);

/**
 * Sine-kernel gap probability on an interval of half-length s
 * (`nodes` = 0 picks the default).
 *
 * # Safety
 * `out` must be writable.
 */
enum ToeplabStatus toeplab_sine_gap(double s, size_t nodes, struct ToeplabLogDet *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TOEPLAB_H */
