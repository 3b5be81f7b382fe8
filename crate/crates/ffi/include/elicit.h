#ifndef ELICIT_H
#define ELICIT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ElicitStatus {
  ELICIT_STATUS_OK = 0,
  ELICIT_STATUS_NULL_POINTER = 1,
  ELICIT_STATUS_INVALID_ARGUMENT = 2,
  ELICIT_STATUS_DOMAIN = 3,
  ELICIT_STATUS_INVERSION_DOMAIN = 4,
  ELICIT_STATUS_PRECONDITION = 5,
  ELICIT_STATUS_AGGREGATION = 6,
  ELICIT_STATUS_CONFIG = 7,
  ELICIT_STATUS_IO = 8,
  ELICIT_STATUS_BUFFER_TOO_SMALL = 9,
  ELICIT_STATUS_ARITY = 10,
  ELICIT_STATUS_NUMERIC = 11,
  ELICIT_STATUS_PANIC = 99,
} ElicitStatus;

typedef enum ElicitMechanismKind {
  ELICIT_MECHANISM_KIND_SINGLE_SAMPLE_MOMENTS = 0,
  ELICIT_MECHANISM_KIND_SINGLE_SAMPLE_FULL_PPD = 1,
  ELICIT_MECHANISM_KIND_TWO_SAMPLE_DIRICHLET = 2,
} ElicitMechanismKind;

typedef enum ElicitFamily {
  /**
   * `param` is the known observation variance.
   */
  ELICIT_FAMILY_NORMAL = 0,
  ELICIT_FAMILY_POISSON = 1,
  ELICIT_FAMILY_UNIFORM = 2,
  /**
   * `param` is the number of labels `K`.
   */
  ELICIT_FAMILY_CATEGORICAL = 3,
  ELICIT_FAMILY_BERNOULLI = 4,
} ElicitFamily;

/**
 * Opaque mechanism handle.
 */
typedef struct ElicitMechanism ElicitMechanism;

/**
 * Opaque handle to a completed scenario run.
 */
typedef struct ElicitRun ElicitRun;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Builds a mechanism for `family` with prior `(prior_nu, prior_n)`.
 *
 * # Safety
 * `prior_nu` must point to `nu_len` doubles and `out` must be writable.
 */
enum ElicitStatus elicit_mechanism_new(enum ElicitMechanismKind kind,
                                       enum ElicitFamily family,
                                       double family_param,
                                       const double *prior_nu,
                                       size_t nu_len,
                                       double prior_n,
                                       struct ElicitMechanism **out);

/**
 * # Safety
 * `mech` must be null or a handle from [`elicit_mechanism_new`] not yet freed.
 */
void elicit_mechanism_free(struct ElicitMechanism *mech);

/**
 * Truthful report of an agent whose posterior is `(agent_nu, agent_n)`.
 *
 * # Safety
 * `mech` must be a live handle, `agent_nu` must point to `nu_len` doubles,
 * `report` to `cap` writable doubles, and `report_len` must be writable.
 */
enum ElicitStatus elicit_mechanism_elicit(const struct ElicitMechanism *mech,
                                          const double *agent_nu,
                                          size_t nu_len,
                                          double agent_n,
                                          double *report,
                                          size_t cap,
                                          size_t *report_len);

/**
 * Recovers the agent's hyper from a flat report.
 *
 * # Safety
 * `mech` must be a live handle, `report` must point to `report_len`
 * doubles, `nu_out` to `cap` writable doubles, and `nu_len` and `n_out`
 * must be writable.
 */
enum ElicitStatus elicit_mechanism_decode(const struct ElicitMechanism *mech,
                                          const double *report,
                                          size_t report_len,
                                          double *nu_out,
                                          size_t cap,
                                          size_t *nu_len,
                                          double *n_out);

/**
 * Decodes `count` reports of `stride` values each, laid end to end, and
 * pools them into the global posterior hyper.
 *
 * # Safety
 * `reports` must point to `count * stride` doubles; output pointers as in
 * [`elicit_mechanism_decode`].
 */
enum ElicitStatus elicit_mechanism_aggregate(const struct ElicitMechanism *mech,
                                             const double *reports,
                                             size_t stride,
                                             size_t count,
                                             double *nu_out,
                                             size_t cap,
                                             size_t *nu_len,
                                             double *n_out);

/**
 * `P(x1 = x2)` for two draws from one Dirichlet(`alpha`) categorical.
 *
 * # Safety
 * `alpha` must point to `k` doubles and `out` must be writable.
 */
enum ElicitStatus elicit_match_probability(const double *alpha, size_t k, double *out);

/**
 * Dirichlet pseudo-counts from a first-sample distribution `p` and a match
 * probability `b`.
 *
 * # Safety
 * `p` must point to `k` doubles, `alpha_out` to `cap` writable doubles,
 * and `alpha_len` must be writable.
 */
enum ElicitStatus elicit_invert_two_sample(const double *p,
                                           size_t k,
                                           double b,
                                           double *alpha_out,
                                           size_t cap,
                                           size_t *alpha_len);

/**
 * Parses a scenario (same text format as the CLI's config files) and runs
 * it. `seed` overrides the configured seed unless `use_seed` is false.
 *
 * # Safety
 * `config_text` must be a NUL-terminated string and `out` must be writable.
 */
enum ElicitStatus elicit_run_scenario(const char *config_text,
                                      bool use_seed,
                                      uint64_t seed,
                                      struct ElicitRun **out);

/**
 * # Safety
 * `run` must be null or a handle from [`elicit_run_scenario`] not yet freed.
 */
void elicit_run_free(struct ElicitRun *run);

/**
 * Trial count, pass count, and largest relative hyper error of a run.
 *
 * # Safety
 * `run` must be a live handle; output pointers must be writable.
 */
enum ElicitStatus elicit_run_summary(const struct ElicitRun *run,
                                     size_t *trials,
                                     size_t *passed,
                                     double *max_rel_error);

/**
 * Line-delimited JSON records of the run. Borrowed: valid until
 * [`elicit_run_free`].
 *
 * # Safety
 * `run` must be null or a live handle.
 */
const char *elicit_run_records(const struct ElicitRun *run);

/**
 * Message of the last failed call on this thread, or null. The caller owns
 * the string and releases it with [`elicit_string_free`].
 */
char *elicit_last_error_message(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library and not yet freed.
 */
void elicit_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ELICIT_H */
