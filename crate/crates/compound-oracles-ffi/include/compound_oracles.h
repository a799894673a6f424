#ifndef COMPOUND_ORACLES_H
#define COMPOUND_ORACLES_H

/* Generated by cbindgen from compound-oracles-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Which Gaussian member a two-point component uses.
 */
typedef enum CoMemberKind {
  /**
   * N(param, 1).
   */
  CO_MEMBER_KIND_LOCATION = 0,
  /**
   * N(0, param), param > 0.
   */
  CO_MEMBER_KIND_SCALE = 1,
} CoMemberKind;

/**
 * Status codes for every fallible entry point.
 */
typedef enum CoStatus {
  CO_STATUS_OK = 0,
  CO_STATUS_NULL_POINTER = 1,
  CO_STATUS_INVALID_ARGUMENT = 2,
  CO_STATUS_DOMAIN_ERROR = 3,
  CO_STATUS_CONTRACT_ERROR = 4,
  CO_STATUS_CAPACITY_ERROR = 5,
  CO_STATUS_NUMERIC_ERROR = 6,
  CO_STATUS_INTERNAL_PANIC = 7,
} CoStatus;

/**
 * Which permutation-invariant engine to run.
 */
typedef enum CoEngine {
  /**
   * Brute-force enumeration, n <= 8.
   */
  CO_ENGINE_ENUM = 0,
  /**
   * Permanental minors, 2 <= n <= 17.
   */
  CO_ENGINE_PERMANENT = 1,
  /**
   * Two-valued multisets, any n.
   */
  CO_ENGINE_TWO_VALUED = 2,
} CoEngine;

/**
 * Opaque handle to an observation family.
 */
typedef struct CoFamily CoFamily;

/**
 * Flat result of a paired Monte Carlo risk comparison.
 */
typedef struct CoGapReport {
  double gap_sq;
  double gap_sq_stderr;
  double risk_s;
  double risk_s_stderr;
  double risk_pi;
  double risk_pi_stderr;
  double risk_diff;
  double risk_diff_stderr;
  double pythagoras_residual;
  double pythagoras_stderr;
  uint64_t reps;
  uint64_t seed;
} CoGapReport;

/**
 * Static version string of the underlying library.
 */
const char *co_version(void);

/**
 * New unit-variance location family (parameter = mean).
 */
struct CoFamily *co_family_new_gaussian_location(void);

/**
 * New centered scale family (parameter = variance, must be positive).
 */
struct CoFamily *co_family_new_gaussian_scale(void);

/**
 * New two-point family with member densities for labels 0 and 1.
 * Returns null when a member parameter is inadmissible.
 */
struct CoFamily *co_family_new_two_point(enum CoMemberKind kind0,
                                         double param0,
                                         enum CoMemberKind kind1,
                                         double param1);

/**
 * Frees a family handle; accepts null.
 */
void co_family_free(struct CoFamily *family);

/**
 * log f_mu(y) with respect to Lebesgue measure.
 *
 * # Safety
 * `family` must be a live handle and `out` a valid pointer.
 */
enum CoStatus co_log_density(const struct CoFamily *family, double mu, double y, double *out);

/**
 * One draw from F_mu off RNG substream (seed, stream).
 *
 * # Safety
 * `family` must be a live handle and `out` a valid pointer.
 */
enum CoStatus co_sample(const struct CoFamily *family,
                        double mu,
                        uint64_t seed,
                        uint64_t stream,
                        double *out);

/**
 * Best simple symmetric rule; writes n estimates to `out`.
 *
 * # Safety
 * `mus`, `ys` and `out` must point to n readable (resp. writable) doubles.
 */
enum CoStatus co_simple_rule(const struct CoFamily *family,
                             const double *mus,
                             const double *ys,
                             size_t n,
                             double *out);

/**
 * Best permutation-invariant rule via the chosen engine; writes n
 * estimates to `out`.
 *
 * # Safety
 * `mus`, `ys` and `out` must point to n readable (resp. writable) doubles.
 */
enum CoStatus co_pi_rule(const struct CoFamily *family,
                         enum CoEngine engine,
                         const double *mus,
                         const double *ys,
                         size_t n,
                         double *out);

/**
 * Simple symmetric rule for a two-valued multiset given log likelihood
 * ratios directly.
 *
 * # Safety
 * `log_rho` must point to n readable doubles and `out` to n writable ones.
 */
enum CoStatus co_simple_rule_two_valued(const double *log_rho,
                                        size_t n,
                                        size_t k,
                                        double mu0,
                                        double mu1,
                                        double *out);

/**
 * Paired Monte Carlo comparison of the two rules; fills `out`.
 *
 * # Safety
 * `mus` must point to n readable doubles and `out` to a `CoGapReport`.
 */
enum CoStatus co_mc_gap(const struct CoFamily *family,
                        enum CoEngine engine,
                        const double *mus,
                        size_t n,
                        uint64_t reps,
                        uint64_t seed,
                        struct CoGapReport *out);

/**
 * Log of the permanent of exp(log_entries), an n-by-n row-major matrix.
 * Writes the log magnitude and the sign (+1, 0, -1).
 *
 * # Safety
 * `log_entries` must point to n*n readable doubles; `out_log` and
 * `out_sign` must be valid pointers.
 */
enum CoStatus co_permanent_log(const double *log_entries,
                               size_t n,
                               double *out_log,
                               int32_t *out_sign);

/**
 * Elementary symmetric polynomials of exp(log_rhos) in log space; writes
 * n+1 values (e_0 through e_n) to `out`.
 *
 * # Safety
 * `log_rhos` must point to n readable doubles and `out` to n+1 writable
 * ones.
 */
enum CoStatus co_esp_log(const double *log_rhos, size_t n, double *out);

#endif  /* COMPOUND_ORACLES_H */
