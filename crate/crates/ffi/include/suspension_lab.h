#ifndef SUSPENSION_LAB_H
#define SUSPENSION_LAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SlStatus {
  SL_STATUS_OK = 0,
  SL_STATUS_NULL_POINTER = 1,
  SL_STATUS_INVALID_ARGUMENT = 2,
  SL_STATUS_DOMAIN_ERROR = 3,
  SL_STATUS_PRECONDITION = 4,
  SL_STATUS_COVERAGE = 5,
  SL_STATUS_ANOMALY = 6,
  SL_STATUS_INTERNAL = 7,
  SL_STATUS_UTF8 = 8,
} SlStatus;

typedef enum SlVerdict {
  SL_VERDICT_CONSERVATIVE = 0,
  SL_VERDICT_TOTALLY_DISSIPATIVE = 1,
  SL_VERDICT_INCONCLUSIVE = 2,
  SL_VERDICT_NOT_NONSINGULAR = 3,
} SlVerdict;

/**
 * Opaque intensity profile.
 */
typedef struct SlProfile SlProfile;

/**
 * Opaque classification report.
 */
typedef struct SlReport SlReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * `a_n = base * scale * exp(sign * n^-gamma)` for `n > 1`, `base * scale` elsewhere.
 * `sign` must be `1` or `-1`.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum SlStatus sl_profile_new_power(double base,
                                   double scale,
                                   double gamma,
                                   int32_t sign,
                                   struct SlProfile **out);

/**
 * Constant intensity `base * scale`.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum SlStatus sl_profile_new_zero(double base, double scale, struct SlProfile **out);

/**
 * `eps_n = left` for `n <= 0` and `right` for `n >= 1`.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum SlStatus sl_profile_new_step(double base,
                                  double scale,
                                  double left,
                                  double right,
                                  struct SlProfile **out);

/**
 * Profile from its JSON document, e.g.
 * `{"base": 1, "epsilon": {"kind": "power", "gamma": 0.5, "sign": -1}}`.
 *
 * # Safety
 * `json` must be a nul-terminated string; `out` must be writable.
 */
enum SlStatus sl_profile_from_json(const char *json, struct SlProfile **out);

/**
 * # Safety
 * `profile` must come from an `sl_profile_*` constructor and not be used
 * afterwards. Null is ignored.
 */
void sl_profile_free(struct SlProfile *profile);

/**
 * `a_n` for the profile.
 *
 * # Safety
 * `profile` must be a live handle; `out` must be writable.
 */
enum SlStatus sl_eval_intensity(const struct SlProfile *profile, int64_t n, double *out);

/**
 * `ln P(N = k)` for `N ~ Poisson(rate)`; `DomainError` when the mass is zero.
 *
 * # Safety
 * `out` must be writable.
 */
enum SlStatus sl_poisson_log_pmf(double rate, uint64_t k, double *out);

/**
 * Modified Bessel function `I_k(z)` for `z >= 0`.
 *
 * # Safety
 * `out` must be writable.
 */
enum SlStatus sl_bessel_i(int64_t k, double z, double *out);

/**
 * `P(X - Y = k)` for independent `X ~ Poisson(a)`, `Y ~ Poisson(b)`.
 *
 * # Safety
 * `out` must be writable.
 */
enum SlStatus sl_skellam_pmf(double a, double b, int64_t k, double *out);

/**
 * Characteristic function of the Skellam law at `t`.
 *
 * # Safety
 * `re` and `im` must be writable.
 */
enum SlStatus sl_skellam_cf(double a, double b, double t, double *re, double *im);

/**
 * `P(|X - Y| >= l)` and its analytic bound, for `l >= 1`.
 *
 * # Safety
 * `exact` and `bound` must be writable.
 */
enum SlStatus sl_skellam_tail(double a, double b, uint32_t l, double *exact, double *bound);

/**
 * Squared Hellinger distance between `Poisson(a)` and `Poisson(b)`.
 *
 * # Safety
 * `out` must be writable.
 */
enum SlStatus sl_hellinger_sq_poisson(double a, double b, double *out);

/**
 * `I(n)`, the integral of the squared density ratio minus one, to
 * absolute tolerance `tol`; `Precondition` when `chi != 0`.
 *
 * # Safety
 * `profile` must be a live handle; `out` must be writable.
 */
enum SlStatus sl_rn_square_integral(const struct SlProfile *profile,
                                    uint64_t n,
                                    double tol,
                                    double *out);

/**
 * `H(n)`, the squared Hellinger growth of the shift by `n`.
 *
 * # Safety
 * `profile` must be a live handle; `out` must be writable.
 */
enum SlStatus sl_hellinger_growth(const struct SlProfile *profile,
                                  uint64_t n,
                                  double tol,
                                  double *out);

/**
 * Conservative / dissipative verdict with its certificate.
 *
 * # Safety
 * `profile` must be a live handle; `out` must be writable.
 */
enum SlStatus sl_classify(const struct SlProfile *profile, struct SlReport **out);

/**
 * # Safety
 * `report` must be a live handle; `out` must be writable.
 */
enum SlStatus sl_report_verdict(const struct SlReport *report, enum SlVerdict *out);

/**
 * The full report as JSON; release with [`sl_string_free`].
 *
 * # Safety
 * `report` must be a live handle; `out` must be writable.
 */
enum SlStatus sl_report_to_json(const struct SlReport *report, char **out);

/**
 * # Safety
 * `report` must come from [`sl_classify`] and not be used afterwards.
 * Null is ignored.
 */
void sl_report_free(struct SlReport *report);

/**
 * # Safety
 * `s` must come from this library and not be used afterwards. Null is ignored.
 */
void sl_string_free(char *s);

/**
 * Message of the last failure on this thread, or null. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *sl_last_error_message(void);

/**
 * Library version as a static nul-terminated string.
 */
const char *sl_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SUSPENSION_LAB_H */
