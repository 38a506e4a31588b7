/*
 * geniemac C API.
 *
 * Sum capacity, successive-interference-cancellation rates and genie-MAC
 * outer bounds for K-user real Gaussian interference channels.
 *
 * Conventions:
 *  - Every fallible call returns a gm_status; on failure the message is
 *    available from gm_last_error() on the same thread until the next call.
 *  - Objects are opaque handles created by gm_*_create/load/build functions
 *    and released by the matching gm_*_destroy (NULL is accepted).
 *  - Matrices are K*K doubles, row major. User indices are zero based.
 *  - Rates are bits per real channel use (log base 2).
 *  - Strings returned through char** are owned by the caller and released
 *    with gm_string_free.
 */
#ifndef GENIEMAC_GENIEMAC_H
#define GENIEMAC_GENIEMAC_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(GENIEMAC_BUILDING)
#define GM_API __declspec(dllexport)
#else
#define GM_API __declspec(dllimport)
#endif
#else
#define GM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gm_status {
  GM_OK = 0,
  GM_ERR_INVALID_ARGUMENT = 1,
  GM_ERR_NOT_DEGRADED = 2,
  GM_ERR_NOT_POSITIVE_DEFINITE = 3,
  GM_ERR_OUT_OF_RANGE = 4,
  GM_ERR_PARSE = 5,
  GM_ERR_IO = 6,
  GM_ERR_TOO_MANY_ORDERINGS = 7,
  GM_ERR_INTERNAL = 8
} gm_status;

GM_API const char* gm_version(void);
GM_API const char* gm_status_name(gm_status status);
/* Message of the last failure on this thread, "" if none. */
GM_API const char* gm_last_error(void);
GM_API void gm_string_free(char* str);

/* ---- channels ---------------------------------------------------------- */

typedef struct gm_channel gm_channel;

GM_API gm_status gm_channel_create(size_t users, const double* gains, double power, double noise,
                                   gm_channel** out);
/* Channel in (a, b) form: H = a b^T. */
GM_API gm_status gm_channel_create_factored(size_t users, const double* a, const double* b, double power,
                                            double noise, gm_channel** out);
/* JSON channel file: {"H": [[..]], "P": .., "N": ..} or {"a": [..], "b": [..], "P": .., "N": ..}. */
GM_API gm_status gm_channel_load(const char* path, gm_channel** out);
GM_API gm_status gm_channel_parse(const char* text, gm_channel** out);
GM_API void gm_channel_destroy(gm_channel* ch);

GM_API size_t gm_channel_users(const gm_channel* ch);
GM_API double gm_channel_power(const gm_channel* ch);
GM_API double gm_channel_noise(const gm_channel* ch);
/* Empty string when the file had no label. Owned by the handle. */
GM_API const char* gm_channel_label(const gm_channel* ch);
GM_API gm_status gm_channel_gains(const gm_channel* ch, double* gains_out);
/* P = N = 1 with gains scaled by sqrt(P/N). */
GM_API gm_status gm_channel_normalize(const gm_channel* ch, gm_channel** out);
/* sigma_2 / sigma_1 of H. */
GM_API gm_status gm_channel_singular_ratio(const gm_channel* ch, double* out);
GM_API gm_status gm_channel_to_json(const gm_channel* ch, char** json_out);

/* ---- degraded channels ------------------------------------------------- */

typedef struct gm_degraded gm_degraded;

/* Rank-one factorization with a >= 0 and a^2 ascending. Fails with
 * GM_ERR_NOT_DEGRADED when sigma_2/sigma_1 > tol; ratio_out (nullable)
 * receives the ratio either way. A channel created in (a, b) form is
 * canonicalized without an SVD. */
GM_API gm_status gm_channel_factor(const gm_channel* ch, double tol, gm_degraded** out, double* ratio_out);
GM_API gm_status gm_degraded_create(size_t users, const double* a, const double* b, double power, double noise,
                                    gm_degraded** out);
GM_API void gm_degraded_destroy(gm_degraded* dc);

GM_API size_t gm_degraded_users(const gm_degraded* dc);
GM_API double gm_degraded_power(const gm_degraded* dc);
GM_API double gm_degraded_noise(const gm_degraded* dc);
/* Canonical (sorted) a and b; either pointer may be NULL. */
GM_API gm_status gm_degraded_factors(const gm_degraded* dc, double* a_out, double* b_out);
/* order_out[p] = original user at canonical position p; flip_out[p] = -1 if
 * that receiver was negated, else +1. Either pointer may be NULL. */
GM_API gm_status gm_degraded_order(const gm_degraded* dc, size_t* order_out, int* flip_out);

/* SIC rate of canonical user i. */
GM_API gm_status gm_sic_rate(const gm_degraded* dc, size_t i, double* out);
/* rates_out (K entries) and telescoped_out may be NULL. */
GM_API gm_status gm_sic_sum_rate(const gm_degraded* dc, double* rates_out, double* sum_out, double* telescoped_out);
GM_API gm_status gm_degraded_sum_capacity(const gm_degraded* dc, double* out);
GM_API int gm_degraded_dof(const gm_degraded* dc);

/* ---- certificates ------------------------------------------------------ */

typedef struct gm_certificate gm_certificate;

typedef enum gm_cert_part {
  GM_CERT_A = 0, /* K   normalized a */
  GM_CERT_B = 1, /* K   normalized b */
  GM_CERT_C = 2, /* K   */
  GM_CERT_T = 3, /* K*K */
  GM_CERT_D = 4, /* K*K */
  GM_CERT_G = 5, /* K*K */
  GM_CERT_V = 6, /* K*K */
  GM_CERT_F = 7  /* K*K */
} gm_cert_part;

typedef enum gm_cert_check {
  GM_CHECK_STRUCTURE = 0,
  GM_CHECK_UNIT_NORM = 1,
  GM_CHECK_PROJECTION = 2,
  GM_CHECK_UPPER_MATCH = 3,
  GM_CHECK_HYPOTHESIS = 4,
  GM_CHECK_VF_LOWER = 5,
  GM_CHECK_VF_DIAGONAL = 6,
  GM_CHECK_DETERMINANT = 7,
  GM_CHECK_COUNT = 8
} gm_cert_check;

typedef struct gm_certificate_report {
  double residual[GM_CHECK_COUNT];
  int passed[GM_CHECK_COUNT];
  double max_residual;
  int all_passed;
} gm_certificate_report;

GM_API gm_status gm_certificate_build(const gm_degraded* dc, gm_certificate** out);
GM_API void gm_certificate_destroy(gm_certificate* cert);
GM_API size_t gm_certificate_users(const gm_certificate* cert);
GM_API gm_status gm_certificate_get(const gm_certificate* cert, gm_cert_part part, double* out);
/* Overwrites one part (fault injection, externally supplied matrices). */
GM_API gm_status gm_certificate_set(gm_certificate* cert, gm_cert_part part, const double* values);
/* vf_bits from the (V F) diagonal, logdet_bits from a Cholesky of F. */
GM_API gm_status gm_certificate_bound(const gm_certificate* cert, double* vf_bits, double* logdet_bits);
GM_API gm_status gm_certificate_verify(const gm_certificate* cert, const gm_degraded* dc, double tol,
                                       gm_certificate_report* report);
GM_API const char* gm_cert_check_name(gm_cert_check check);
/* Instance-file JSON in the channel's original units and labelling. */
GM_API gm_status gm_certificate_export(const gm_certificate* cert, const gm_degraded* dc, char** json_out);

/* ---- genie-MAC instances ----------------------------------------------- */

typedef struct gm_instance gm_instance;

typedef enum gm_instance_part { GM_INST_G = 0, GM_INST_SIGMA = 1, GM_INST_T = 2 } gm_instance_part;

/* sigma may be NULL (identity); subset may be NULL (0..k-1). */
GM_API gm_status gm_instance_create(size_t k, const double* g, const double* sigma, const double* t,
                                    const size_t* subset, gm_instance** out);
GM_API gm_status gm_instance_load(const char* path, gm_instance** out);
GM_API gm_status gm_instance_parse(const char* text, gm_instance** out);
GM_API void gm_instance_destroy(gm_instance* inst);
GM_API size_t gm_instance_size(const gm_instance* inst);
GM_API gm_status gm_instance_get(const gm_instance* inst, gm_instance_part part, double* out);
GM_API gm_status gm_instance_subset(const gm_instance* inst, size_t* subset_out);
GM_API gm_status gm_instance_to_json(const gm_instance* inst, char** json_out);

/* ½ log2 |I + P Sigma^{-1} G G^T|. */
GM_API gm_status gm_mac_sum_capacity(const gm_instance* inst, double power, double* out);

typedef struct gm_feasibility_report {
  double upper_residual;
  double noise_excess;
  double sigma_min_eigenvalue;
  int upper_ok;
  int noise_ok;
  int sigma_ok;
  int feasible;
} gm_feasibility_report;

/* Checks the instance against H_S of `ch` for the instance's subset and the
 * channel's noise variance. */
GM_API gm_status gm_check_feasible(const gm_instance* inst, const gm_channel* ch, double tol,
                                   gm_feasibility_report* report);
GM_API gm_status gm_whiten(const gm_instance* inst, gm_instance** out);
GM_API gm_status gm_to_T_identity(const gm_instance* inst, double eps, double noise, gm_instance** out);
GM_API gm_status gm_to_G_identity(const gm_instance* inst, double eps, gm_instance** out);

/* ---- optimizer --------------------------------------------------------- */

typedef struct gm_optimizer_config {
  int starts;
  uint64_t seed;
  int max_iters;
  double tol;
  double cond_limit;
} gm_optimizer_config;

GM_API gm_optimizer_config gm_optimizer_config_default(void);

typedef struct gm_bound gm_bound;

/* Upper estimate of f*(H_S) for the ordered subset; cfg may be NULL. */
GM_API gm_status gm_bound_optimize(const gm_channel* ch, const size_t* subset, size_t k,
                                   const gm_optimizer_config* cfg, gm_bound** out);
GM_API void gm_bound_destroy(gm_bound* bound);
GM_API double gm_bound_value(const gm_bound* bound);
GM_API int gm_bound_converged(const gm_bound* bound);
GM_API size_t gm_bound_size(const gm_bound* bound);
GM_API gm_status gm_bound_subset(const gm_bound* bound, size_t* subset_out);
GM_API gm_status gm_bound_instance(const gm_bound* bound, gm_instance** out);
GM_API gm_status gm_bound_feasibility(const gm_bound* bound, gm_feasibility_report* report);

typedef struct gm_region gm_region;

/* All subsets of size <= max_k, minimized over orderings. */
GM_API gm_status gm_region_compute(const gm_channel* ch, size_t max_k, const gm_optimizer_config* cfg, int force,
                                   gm_region** out);
GM_API void gm_region_destroy(gm_region* region);
GM_API size_t gm_region_count(const gm_region* region);
/* members_out receives ascending indices (capacity K); best_order_out the
 * minimizing ordering. Either may be NULL. */
GM_API gm_status gm_region_entry(const gm_region* region, size_t index, size_t* size_out, size_t* members_out,
                                 size_t* best_order_out, double* value_out, int* converged_out);
GM_API size_t gm_region_ordering_count(const gm_region* region, size_t index);
GM_API gm_status gm_region_ordering(const gm_region* region, size_t index, size_t ordering, size_t* order_out,
                                    double* value_out);

/* ---- batch sweeps ------------------------------------------------------ */

typedef struct gm_sweep_spec {
  size_t users;
  size_t count;
  uint64_t seed;
  double gain_lo;
  double gain_hi;
  double power;
  double noise;
  int degraded;
} gm_sweep_spec;

GM_API gm_sweep_spec gm_sweep_spec_default(void);
GM_API const char* gm_sweep_header(void);
/* CSV text (header + one row per sample). cfg may be NULL. */
GM_API gm_status gm_sweep_csv(const gm_sweep_spec* spec, const gm_optimizer_config* cfg, char** csv_out);

#ifdef __cplusplus
}
#endif

#endif /* GENIEMAC_GENIEMAC_H */
