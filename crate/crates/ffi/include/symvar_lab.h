#ifndef SYMVAR_LAB_H
#define SYMVAR_LAB_H

/* Generated by cbindgen from symvar-lab-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every entry point.
 */
typedef enum {
  SVL_STATUS_OK = 0,
  /**
   * evaluation point outside the metric domain
   */
  SVL_STATUS_DOMAIN_ERROR = 1,
  /**
   * warping function degenerate at the requested point
   */
  SVL_STATUS_DEGENERATE_ERROR = 2,
  /**
   * invalid argument (null pointer, parameter out of range)
   */
  SVL_STATUS_INPUT_ERROR = 3,
  /**
   * quadrature / solver failure
   */
  SVL_STATUS_NUMERIC_ERROR = 4,
  /**
   * internal panic caught at the boundary
   */
  SVL_STATUS_PANIC_ERROR = 5,
} SvlStatus;

/**
 * Opaque metric handle.
 */
typedef struct {
  uint8_t _private[0];
} SvlMetric;

/**
 * Pointwise curvature package in the orthonormal frame
 * (radial, fiber1, fiber2).
 */
typedef struct {
  double k12;
  double k13;
  double k23;
  double ric1;
  double ric2;
  double ric3;
  double s;
  double z1;
  double z2;
  double z3;
  double znorm2;
  double rnorm2;
} SvlCurvature;

/**
 * Scale-invariant functionals of one metric at a given eps.
 */
typedef struct {
  double volume;
  double z2;
  double sminus2;
  double sigma;
  double i_eps_minus;
  double c_const;
  double eps;
} SvlReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *svl_version(void);

/**
 * Schwarzschild exterior metric of mass `m` in arclength form, out to area
 * radius `r_max`.
 *
 * # Safety
 * `out` must point to writable handle storage.
 */
SvlStatus svl_metric_schwarzschild(double m, double r_max, SvlMetric **out);

/**
 * Kasner torus-warped metric with parameter `d` in (0,1) on the annulus
 * [t_min, t_max].
 *
 * # Safety
 * `out` must point to writable handle storage.
 */
SvlStatus svl_metric_kasner(double d, double t_min, double t_max, SvlMetric **out);

/**
 * Sphere-warped metric from uniform samples of the warping function on
 * [t0, t1] (at least 5 samples; derivatives come from quartic stencils).
 *
 * # Safety
 * `values` must point to `n` readable doubles; `out` as above.
 */
SvlStatus svl_metric_sphere_from_samples(const double *values,
                                         uintptr_t n,
                                         double t0,
                                         double t1,
                                         SvlMetric **out);

/**
 * Release a metric handle (accepts null).
 *
 * # Safety
 * `h` must be a handle from a constructor, released at most once.
 */
void svl_metric_free(SvlMetric *h);

/**
 * Domain [t0, t1] of the metric's radial coordinate.
 *
 * # Safety
 * `h` live handle; `t0`, `t1` writable.
 */
SvlStatus svl_metric_domain(const SvlMetric *h, double *t0, double *t1);

/**
 * Pointwise curvature at t (analytic/stencil profile derivatives).
 *
 * # Safety
 * `h` live handle; `out` writable.
 */
SvlStatus svl_curvature_at(const SvlMetric *h, double t, SvlCurvature *out);

/**
 * Value-only 5-point-stencil curvature oracle with spacing `step`.
 *
 * # Safety
 * `h` live handle; `out` writable.
 */
SvlStatus svl_curvature_oracle(const SvlMetric *h, double t, double step, SvlCurvature *out);

/**
 * Volume of the metric over [a, b].
 *
 * # Safety
 * `h` live handle; `out` writable.
 */
SvlStatus svl_volume(const SvlMetric *h, double a, double b, double *out);

/**
 * Scale-invariant functional report of the metric at `eps`.
 *
 * # Safety
 * `h` live handle; `out` writable.
 */
SvlStatus svl_functional_report(const SvlMetric *h, double eps, SvlReport *out);

/**
 * Value of the constrained-system potential of the Schwarzschild solution
 * at area radius r (equation-consistent normalization).
 *
 * # Safety
 * `out` writable.
 */
SvlStatus svl_schwarzschild_tau(double m, double alpha, double r, double *out);

/**
 * Kasner exponents (a, b, c) for d in (0, 1).
 *
 * # Safety
 * `a`, `b`, `c_exp` writable.
 */
SvlStatus svl_kasner_exponents(double d, double *a, double *b, double *c_exp);

/**
 * The smoothing of min(s, 0) at parameter delta.
 *
 * # Safety
 * `out` writable.
 */
SvlStatus svl_smoothing_phi(double delta, double s, double *out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* SYMVAR_LAB_H */
