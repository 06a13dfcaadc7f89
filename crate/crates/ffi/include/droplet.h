#ifndef DROPLET_H
#define DROPLET_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes, numerically equal to the CLI exit codes where they overlap.
 */
typedef enum DropletStatus {
  DROPLET_STATUS_OK = 0,
  /**
   * Certification ran but did not separate the bounds, or the sign check failed.
   */
  DROPLET_STATUS_INCONCLUSIVE = 1,
  DROPLET_STATUS_INVALID_INPUT = 2,
  DROPLET_STATUS_UNSUPPORTED = 3,
  DROPLET_STATUS_INTERNAL = 4,
  DROPLET_STATUS_NULL_POINTER = 5,
} DropletStatus;

typedef enum DropletRegime {
  DROPLET_REGIME_RIESZ_CLOSED_FORM = 0,
  DROPLET_REGIME_TRUNC_SUBCRITICAL = 1,
  DROPLET_REGIME_TRUNC_INTERMEDIATE = 2,
  DROPLET_REGIME_TRUNC_RIESZ_REGIME = 3,
  DROPLET_REGIME_YUKAWA_FLAT = 4,
  DROPLET_REGIME_YUKAWA_INTERIOR = 5,
} DropletRegime;

typedef enum DropletVerdict {
  DROPLET_VERDICT_CERTIFIED = 0,
  DROPLET_VERDICT_INCONCLUSIVE = 1,
} DropletVerdict;

/**
 * Opaque interaction kernel.
 */
typedef struct DropletKernel DropletKernel;

/**
 * Opaque certification report.
 */
typedef struct DropletReport DropletReport;

/**
 * Optimal ball ratio. `r_star` is +inf when the infimum is not attained and
 * NaN when not reported; `lambda_star` is NaN except for Yukawa kernels.
 */
typedef struct DropletBallResult {
  double rho;
  double r_star;
  double lambda_star;
  enum DropletRegime regime;
} DropletBallResult;

typedef struct DropletCylResult {
  double sigma;
  double l;
} DropletCylResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or an empty string.
 * The pointer stays valid until the next call into the library on this thread.
 */
const char *droplet_last_error(void);

/**
 * Parses a kernel spec such as `yukawa:alpha=1,kappa=0.56,n=3`.
 *
 * # Safety
 * `spec` must be a NUL-terminated string and `out` a valid pointer.
 */
enum DropletStatus droplet_kernel_parse(const char *spec, struct DropletKernel **out);

/**
 * # Safety
 * `k` must come from [`droplet_kernel_parse`] and not be freed twice. Null is ignored.
 */
void droplet_kernel_free(struct DropletKernel *k);

/**
 * Canonical spec string of the kernel; free with [`droplet_string_free`].
 *
 * # Safety
 * `k` must be a live kernel handle or null.
 */
char *droplet_kernel_to_string(const struct DropletKernel *k);

/**
 * # Safety
 * `k` must be a live kernel handle and `out` a valid pointer.
 */
enum DropletStatus droplet_rho_ball(const struct DropletKernel *k, struct DropletBallResult *out);

/**
 * σ_cyl at radius `l` with `n_quad` Simpson subintervals (0 for the default).
 *
 * # Safety
 * `k` must be a live kernel handle and `out` a valid pointer.
 */
enum DropletStatus droplet_sigma_cyl(const struct DropletKernel *k,
                                     double l,
                                     size_t n_quad,
                                     double *out);

/**
 * Minimizes σ_cyl over the default search interval. Zero `n_quad` or
 * non-positive `tol` select the defaults.
 *
 * # Safety
 * `k` must be a live kernel handle and `out` a valid pointer.
 */
enum DropletStatus droplet_rho_cyl(const struct DropletKernel *k,
                                   size_t n_quad,
                                   double tol,
                                   struct DropletCylResult *out);

/**
 * Certifies σ_cyl(κ/2) < ρ_ball for the truncated Coulomb kernel.
 * `kappa` is `p/q` or a decimal. A report is stored in `*out` whenever the
 * status is `Ok` or `Inconclusive`.
 *
 * # Safety
 * `kappa` must be a NUL-terminated string and `out` a valid pointer.
 */
enum DropletStatus droplet_certify_trunc_coulomb(const char *kappa,
                                                 uint32_t precision,
                                                 struct DropletReport **out);

/**
 * Certifies σ_cyl(l) < ρ_ball for the Yukawa kernel with an `n`-cell Riemann
 * upper bound and the bracket `[a, b]` around λ*. A failed sign check returns
 * `Inconclusive` with `*out` left null.
 *
 * # Safety
 * String arguments must be NUL-terminated and `out` a valid pointer.
 */
enum DropletStatus droplet_certify_yukawa(const char *kappa,
                                          const char *l,
                                          uint64_t n,
                                          const char *a,
                                          const char *b,
                                          uint32_t precision,
                                          struct DropletReport **out);

/**
 * # Safety
 * `r` must come from a certify call and not be freed twice. Null is ignored.
 */
void droplet_report_free(struct DropletReport *r);

/**
 * # Safety
 * `r` must be a live report handle and `out` a valid pointer.
 */
enum DropletStatus droplet_report_verdict(const struct DropletReport *r, enum DropletVerdict *out);

/**
 * Outward-rounded endpoints: the largest value of the cylinder enclosure and
 * the smallest value of the ball enclosure.
 *
 * # Safety
 * `r` must be a live report handle; output pointers must be valid.
 */
enum DropletStatus droplet_report_bounds(const struct DropletReport *r,
                                         double *cyl_upper,
                                         double *ball_lower);

/**
 * JSON form of the report; free with [`droplet_string_free`]. Null on failure.
 *
 * # Safety
 * `r` must be a live report handle or null.
 */
char *droplet_report_json(const struct DropletReport *r);

/**
 * # Safety
 * `s` must come from this library and not be freed twice. Null is ignored.
 */
void droplet_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DROPLET_H */
