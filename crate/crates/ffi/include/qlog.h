#ifndef QLOG_H
#define QLOG_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QlogConvention {
  QLOG_CONVENTION_SYMMETRIC = 0,
  QLOG_CONVENTION_JACKSON = 1,
} QlogConvention;

typedef enum QlogFamily {
  QLOG_FAMILY_EXP = 0,
  QLOG_FAMILY_COS = 1,
  QLOG_FAMILY_SIN = 2,
  /**
   * r-th derivative of the exponential, `r` taken from [`QlogSpec::r`].
   */
  QLOG_FAMILY_EXP_DERIVATIVE = 3,
  /**
   * r-th integral of the exponential.
   */
  QLOG_FAMILY_EXP_INTEGRAL = 4,
} QlogFamily;

typedef enum QlogLnqMethod {
  QLOG_LNQ_METHOD_RECURSIVE = 0,
  QLOG_LNQ_METHOD_REVERSION = 1,
} QlogLnqMethod;

typedef enum QlogSigmaMethod {
  QLOG_SIGMA_METHOD_SERIES = 0,
  QLOG_SIGMA_METHOD_RECURSIVE = 1,
  QLOG_SIGMA_METHOD_DIRECT = 2,
  QLOG_SIGMA_METHOD_CLOSED_FORM = 3,
  /**
   * Partial sum over located zeros; the count is a separate argument.
   */
  QLOG_SIGMA_METHOD_ZEROS = 4,
} QlogSigmaMethod;

typedef enum QlogStatus {
  QLOG_STATUS_OK = 0,
  QLOG_STATUS_INVALID_ARGUMENT = 1,
  QLOG_STATUS_OUTSIDE_CONVERGENCE = 2,
  QLOG_STATUS_OVERFLOW = 3,
  QLOG_STATUS_NO_CONVERGENCE = 4,
  QLOG_STATUS_INDEX_OUT_OF_RANGE = 5,
  QLOG_STATUS_METHOD_MISMATCH = 6,
  QLOG_STATUS_ROOT_FINDING = 7,
  QLOG_STATUS_CERTIFICATION = 8,
  QLOG_STATUS_INSUFFICIENT_ZEROS = 9,
  QLOG_STATUS_COLLISION = 10,
  QLOG_STATUS_NULL_POINTER = 11,
  QLOG_STATUS_PANIC = 12,
} QlogStatus;

/**
 * Opaque list of series coefficients.
 */
typedef struct QlogCoeffs QlogCoeffs;

/**
 * Opaque list of roots.
 */
typedef struct QlogRoots QlogRoots;

/**
 * One member of the deformed family.
 */
typedef struct QlogSpec {
  double q;
  enum QlogConvention convention;
  enum QlogFamily family;
  /**
   * Order for the derivative and integral families, ignored otherwise.
   */
  uint32_t r;
} QlogSpec;

typedef struct QlogComplex {
  double re;
  double im;
} QlogComplex;

typedef struct QlogValue {
  struct QlogComplex value;
  double error_estimate;
  /**
   * Nonzero when the tail or last-term test certified the value.
   */
  int32_t certified;
} QlogValue;

typedef struct QlogRoot {
  struct QlogComplex location;
  double location_error;
  double residual;
  int32_t certified;
  /**
   * `f` at the root for turning points, zero for plain zeros.
   */
  struct QlogComplex branch_value;
} QlogRoot;

typedef struct QlogCollision {
  /**
   * Zero when the pair stayed real over the sampled range.
   */
  int32_t found;
  double q_star;
  double location;
  /**
   * Width of the final bisection bracket in `q`.
   */
  double bracket_width;
  /**
   * Range of `q` that was searched.
   */
  double q_min;
  double q_max;
} QlogCollision;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copy the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `len`). Returns the full message length without the NUL, or
 * zero when the last call succeeded.
 */
uintptr_t qlog_last_error_message(char *buf, uintptr_t len);

/**
 * Library version as a static NUL-terminated string.
 */
const char *qlog_version(void);

/**
 * The deformed integer `[n]`.
 */
enum QlogStatus qlog_bracket(uint64_t n, double q, enum QlogConvention convention, double *result);

/**
 * Evaluate the family member at `z` to relative tolerance `tol`.
 */
enum QlogStatus qlog_eval(struct QlogSpec spec,
                          struct QlogComplex z,
                          double tol,
                          struct QlogValue *result);

/**
 * Zero sum rule of the given index (a power of `z`). `zeros` is used only
 * by [`QlogSigmaMethod::Zeros`].
 */
enum QlogStatus qlog_sigma(struct QlogSpec spec,
                           uint32_t index,
                           enum QlogSigmaMethod method,
                           uintptr_t zeros,
                           struct QlogValue *result);

/**
 * Coefficients of `ln_q(1+w)` up to degree `n_max`.
 */
enum QlogStatus qlog_lnq_coefficients(double q,
                                      enum QlogConvention convention,
                                      uintptr_t n_max,
                                      enum QlogLnqMethod method,
                                      struct QlogCoeffs **handle);

/**
 * Coefficients of the logarithm series `b(z)` with `f = exp(b)`.
 */
enum QlogStatus qlog_b_series(struct QlogSpec spec, uintptr_t n_max, struct QlogCoeffs **handle);

uintptr_t qlog_coeffs_len(const struct QlogCoeffs *handle);

/**
 * Coefficient and its rounding error estimate at degree `n`.
 */
enum QlogStatus qlog_coeffs_get(const struct QlogCoeffs *handle,
                                uintptr_t n,
                                double *value,
                                double *error);

/**
 * Evaluate `ln_q(1+w)` from a coefficient handle produced by
 * [`qlog_lnq_coefficients`], or `exp(b(w))` from one produced by
 * [`qlog_b_series`].
 */
enum QlogStatus qlog_coeffs_eval(const struct QlogCoeffs *handle,
                                 struct QlogComplex w,
                                 struct QlogValue *result);

void qlog_coeffs_free(struct QlogCoeffs *handle);

/**
 * The `count` zeros of smallest modulus. Trigonometric members return their
 * positive real zeros instead.
 */
enum QlogStatus qlog_zeros(struct QlogSpec spec, uintptr_t count, struct QlogRoots **handle);

/**
 * Real zeros on `[x_min, x_max]`, at most `max_count` of them.
 */
enum QlogStatus qlog_real_zeros(struct QlogSpec spec,
                                double x_min,
                                double x_max,
                                uintptr_t max_count,
                                struct QlogRoots **handle);

/**
 * Turning points (zeros of the derivative) with their branch values,
 * followed from small `q` so complex ones are included.
 */
enum QlogStatus qlog_turning_points(struct QlogSpec spec,
                                    uintptr_t count,
                                    struct QlogRoots **handle);

uintptr_t qlog_roots_len(const struct QlogRoots *handle);

enum QlogStatus qlog_roots_get(const struct QlogRoots *handle, uintptr_t i, struct QlogRoot *root);

void qlog_roots_free(struct QlogRoots *handle);

/**
 * First `q` at which pair `pair` (counted from the origin) of zeros
 * (`turning == 0`) or turning points (`turning != 0`) collides.
 */
enum QlogStatus qlog_collision(struct QlogSpec spec,
                               int32_t turning,
                               uintptr_t pair,
                               struct QlogCollision *result);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QLOG_H */
