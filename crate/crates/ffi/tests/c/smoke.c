#include <math.h>
#include <stdio.h>
#include <string.h>

#include "qclock.h"

static int failures = 0;

#define CHECK(cond)                                                   \
  do {                                                                \
    if (!(cond)) {                                                    \
      fprintf(stderr, "%s:%d: check failed: %s\n", __FILE__, __LINE__, \
              #cond);                                                 \
      failures++;                                                     \
    }                                                                 \
  } while (0)

int main(void) {
  QclockCavity *rest = NULL;
  QclockCavity *moving = NULL;
  QclockFields *fields = NULL;
  QclockResult r;

  CHECK(qclock_cavity_new(1.0, 0.0, &rest) == QCLOCK_STATUS_OK);
  CHECK(qclock_cavity_new(1.0, 0.02, &moving) == QCLOCK_STATUS_OK);
  CHECK(qclock_fields_new(1.0, 1.0, &fields) == QCLOCK_STATUS_OK);

  CHECK(qclock_stationary_rate(rest, fields, &r) == QCLOCK_STATUS_OK);
  CHECK(fabs(r.value - 0.0281034386) < 1e-9);
  CHECK(r.kind == QCLOCK_VALUE_KIND_RATE);

  CHECK(qclock_clock_deviation(moving, fields, 0.05, 64, &r) == QCLOCK_STATUS_OK);
  CHECK(fabs(r.value) < 0.1);
  CHECK(r.window_min <= r.window_max);

  QclockCavity *bad = NULL;
  CHECK(qclock_cavity_new(1.0, 2.0, &bad) == QCLOCK_STATUS_INVALID_ARGUMENT);
  CHECK(bad == NULL);
  CHECK(strstr(qclock_last_error_message(), "horizon") != NULL);

  CHECK(qclock_stationary_rate(NULL, fields, &r) == QCLOCK_STATUS_NULL_POINTER);

  double k;
  CHECK(qclock_bessel_k_imag(1.0, 1.0, &k) == QCLOCK_STATUS_OK);
  CHECK(fabs(k - 0.28942803703) < 1e-10);

  qclock_cavity_free(rest);
  qclock_cavity_free(moving);
  qclock_fields_free(fields);
  printf("%s %d failure(s)\n", qclock_version(), failures);
  return failures != 0;
}
