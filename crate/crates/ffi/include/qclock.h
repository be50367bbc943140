#ifndef QCLOCK_H
#define QCLOCK_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every call.
 */
typedef enum {
  QCLOCK_STATUS_OK = 0,
  /**
   * Arguments outside the model's domain (bad parameters, horizon
   * crossing, threshold, tolerances).
   */
  QCLOCK_STATUS_INVALID_ARGUMENT = 1,
  /**
   * The computation itself failed (non-finite values, lost precision).
   */
  QCLOCK_STATUS_NUMERICAL = 2,
  QCLOCK_STATUS_NULL_POINTER = 3,
  /**
   * A bug inside the library; the message holds the panic payload.
   */
  QCLOCK_STATUS_PANIC = 4,
} QclockStatus;

typedef enum {
  QCLOCK_VALUE_KIND_PROBABILITY = 0,
  QCLOCK_VALUE_KIND_RATE = 1,
  QCLOCK_VALUE_KIND_DEVIATION = 2,
} QclockValueKind;

typedef enum {
  QCLOCK_REGIME_SHORT_TIME = 0,
  QCLOCK_REGIME_GENERIC = 1,
  QCLOCK_REGIME_LONG_TIME = 2,
} QclockRegime;

/**
 * Cavity of proper length `l` with trailing-wall acceleration `alpha`.
 */
typedef struct QclockCavity QclockCavity;

/**
 * Detector gap `mass` and coupling `lambda`.
 */
typedef struct QclockFields QclockFields;

typedef struct {
  double value;
  double error_estimate;
  QclockValueKind kind;
  QclockRegime regime;
  uint64_t evaluations;
  bool converged;
  /**
   * Smallest and largest pointwise rate in an averaging window; NaN when
   * no averaging took place.
   */
  double window_min;
  double window_max;
} QclockResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null if none failed.
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *qclock_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *qclock_version(void);

/**
 * `alpha = 0` is a cavity at rest; `alpha * l` must stay below 2.
 */
QclockStatus qclock_cavity_new(double l, double alpha, QclockCavity **out);

void qclock_cavity_free(QclockCavity *cavity);

/**
 * Frequency of mode `n` (proper frequency at the trailing wall when
 * accelerated).
 */
QclockStatus qclock_cavity_mode_frequency(const QclockCavity *cavity, uint32_t n, double *out);

QclockStatus qclock_fields_new(double mass, double lambda, QclockFields **out);

void qclock_fields_free(QclockFields *fields);

/**
 * Decay probability after coordinate time `t` in a resting cavity.
 * A tolerance of 0 selects the library default.
 */
QclockStatus qclock_stationary_probability(const QclockCavity *cavity,
                                           const QclockFields *fields,
                                           double t,
                                           double rel_tol,
                                           double abs_tol,
                                           QclockResult *out);

QclockStatus qclock_stationary_rate(const QclockCavity *cavity,
                                    const QclockFields *fields,
                                    QclockResult *out);

/**
 * Decay probability after proper time `tau` of the trailing wall.
 * A tolerance of 0 selects the library default.
 */
QclockStatus qclock_accelerated_probability(const QclockCavity *cavity,
                                            const QclockFields *fields,
                                            double tau,
                                            double rel_tol,
                                            double abs_tol,
                                            QclockResult *out);

/**
 * Long-time rate at the cavity's own acceleration, without averaging.
 */
QclockStatus qclock_accelerated_rate(const QclockCavity *cavity,
                                     const QclockFields *fields,
                                     QclockResult *out);

/**
 * Long-time rate averaged over `alpha * (1 +- relative_halfwidth)` with
 * `samples` points, centred on the cavity's acceleration.
 */
QclockStatus qclock_averaged_rate(const QclockCavity *cavity,
                                  const QclockFields *fields,
                                  double relative_halfwidth,
                                  uint32_t samples,
                                  QclockResult *out);

/**
 * Relative deviation of the averaged rate from the resting rate of a cavity
 * of the same length. `relative_halfwidth = 0` compares the pointwise rate.
 */
QclockStatus qclock_clock_deviation(const QclockCavity *cavity,
                                    const QclockFields *fields,
                                    double relative_halfwidth,
                                    uint32_t samples,
                                    QclockResult *out);

/**
 * `|Gamma(i y)|^2 = pi / (y sinh(pi y))`.
 */
QclockStatus qclock_gamma_abs_sq_imag(double y, double *out);

/**
 * Modified Bessel function `K_{i nu}(x)` for real `nu >= 0`, `x > 0`.
 */
QclockStatus qclock_bessel_k_imag(double nu, double x, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QCLOCK_H */
