/*
 * erwlab C API.
 *
 * Every fallible call returns an erwlab_status; on failure the message is
 * available from erwlab_last_error() on the calling thread until the next
 * failing call. Objects are opaque handles owned by the caller and released
 * with the matching *_destroy function (NULL is accepted). Pointers returned
 * by accessors stay valid until the owning handle is destroyed.
 */
#ifndef ERWLAB_H
#define ERWLAB_H

#include <stddef.h>
#include <stdint.h>

#if defined(ERWLAB_BUILDING_LIBRARY)
#define ERWLAB_API __attribute__((visibility("default")))
#else
#define ERWLAB_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum erwlab_status {
  ERWLAB_OK = 0,
  ERWLAB_ERR_INVALID_ARGUMENT = 1,
  ERWLAB_ERR_DOMAIN = 2,
  ERWLAB_ERR_RANGE = 3,
  ERWLAB_ERR_BUDGET = 4,
  ERWLAB_ERR_REGIME = 5,
  ERWLAB_ERR_INTERNAL = 6
} erwlab_status;

typedef enum erwlab_regime {
  ERWLAB_DIFFUSIVE = 0,
  ERWLAB_MARGINAL = 1,
  ERWLAB_SUPERDIFFUSIVE = 2
} erwlab_regime;

ERWLAB_API const char* erwlab_version(void);
ERWLAB_API const char* erwlab_rng_family(void);
ERWLAB_API const char* erwlab_last_error(void);
ERWLAB_API const char* erwlab_status_string(erwlab_status status);
ERWLAB_API const char* erwlab_regime_name(erwlab_regime regime);

/* ---- parameters ------------------------------------------------------- */

typedef struct erwlab_params erwlab_params;

/* p is decimal text so that p = 0.75 is classified exactly. */
ERWLAB_API erwlab_status erwlab_params_create(const char* p_decimal, double s,
                                              erwlab_params** out);
ERWLAB_API void erwlab_params_destroy(erwlab_params* params);
ERWLAB_API double erwlab_params_p(const erwlab_params* params);
ERWLAB_API double erwlab_params_s(const erwlab_params* params);
ERWLAB_API erwlab_regime erwlab_params_regime(const erwlab_params* params);

ERWLAB_API erwlab_status erwlab_conditional_up_probability(const erwlab_params* params,
                                                           int64_t n, int64_t position,
                                                           double* out);
ERWLAB_API erwlab_status erwlab_walk_normalizer(erwlab_regime regime, double p, int64_t n,
                                                double* out);
ERWLAB_API erwlab_status erwlab_diff_normalizer(erwlab_regime regime, double p, int64_t n,
                                                double* out);

/* ---- single walks ----------------------------------------------------- */

typedef struct erwlab_walk erwlab_walk;

ERWLAB_API erwlab_status erwlab_walk_create(const erwlab_params* params, uint64_t seed,
                                            uint64_t stream, erwlab_walk** out);
ERWLAB_API void erwlab_walk_destroy(erwlab_walk* walk);
ERWLAB_API erwlab_status erwlab_walk_advance(erwlab_walk* walk, int64_t steps);
ERWLAB_API void erwlab_walk_state(const erwlab_walk* walk, int64_t* n, int64_t* position);

/* ---- exact oracle ----------------------------------------------------- */

/* max_n <= 0 selects the default oracle cap (20000). */
typedef struct erwlab_pmf erwlab_pmf;

ERWLAB_API erwlab_status erwlab_oracle_pmf(const erwlab_params* params, int64_t n,
                                           int64_t max_n, erwlab_pmf** out);
ERWLAB_API erwlab_status erwlab_oracle_diff_pmf(const erwlab_params* params, int64_t n,
                                                int64_t max_n, erwlab_pmf** out);
ERWLAB_API void erwlab_pmf_destroy(erwlab_pmf* pmf);
ERWLAB_API int64_t erwlab_pmf_n(const erwlab_pmf* pmf);
/* Support is lo, lo + 2, ..., lo + 2 (size - 1). */
ERWLAB_API int64_t erwlab_pmf_lo(const erwlab_pmf* pmf);
ERWLAB_API size_t erwlab_pmf_size(const erwlab_pmf* pmf);
ERWLAB_API const double* erwlab_pmf_probs(const erwlab_pmf* pmf);

/* means and second_moments must hold n_max + 1 values (index = n). */
ERWLAB_API erwlab_status erwlab_oracle_moments(const erwlab_params* params, int64_t n_max,
                                               double* means, double* second_moments);
/* out must hold n_max values; out[k - 1] = P(S_k = S'_k). */
ERWLAB_API erwlab_status erwlab_oracle_meeting_series(const erwlab_params* params,
                                                      int64_t n_max, int64_t max_n,
                                                      double* out);

typedef struct erwlab_meeting_extrapolation {
  int64_t horizon;
  int64_t cap;
  double exact_part;
  double tail_part;
  double total;
  double fit_constant;
  int64_t window_lo;
  int64_t window_hi;
} erwlab_meeting_extrapolation;

ERWLAB_API erwlab_status erwlab_oracle_expected_meetings(const erwlab_params* params,
                                                         int64_t horizon, int64_t max_n,
                                                         erwlab_meeting_extrapolation* out);

/* ---- ensembles -------------------------------------------------------- */

typedef struct erwlab_ensemble_config {
  int64_t replicas;
  int64_t horizon;
  const int64_t* checkpoints; /* sorted, within [1, horizon]; NULL/0 means {horizon} */
  size_t checkpoint_count;
  uint64_t master_seed;
  int32_t workers;
  int64_t n_min_lil;
  double step_budget;
} erwlab_ensemble_config;

ERWLAB_API void erwlab_ensemble_config_init(erwlab_ensemble_config* cfg);

typedef struct erwlab_moments {
  int64_t count;
  double mean;
  double m2;
  double variance;
  double min;
  double max;
} erwlab_moments;

typedef struct erwlab_walk_result erwlab_walk_result;

ERWLAB_API erwlab_status erwlab_walk_ensemble_run(const erwlab_params* params,
                                                  const erwlab_ensemble_config* cfg,
                                                  erwlab_walk_result** out);
ERWLAB_API void erwlab_walk_result_destroy(erwlab_walk_result* result);
ERWLAB_API size_t erwlab_walk_result_checkpoint_count(const erwlab_walk_result* result);
ERWLAB_API erwlab_status erwlab_walk_result_checkpoint(const erwlab_walk_result* result,
                                                       size_t index, int64_t* n,
                                                       double* normalizer, erwlab_moments* raw,
                                                       erwlab_moments* squared,
                                                       erwlab_moments* normalized);
ERWLAB_API const int64_t* erwlab_walk_result_final_positions(const erwlab_walk_result* result,
                                                             size_t* count);

typedef struct erwlab_pair_record {
  int64_t meeting_count;
  int64_t last_meeting;
  int64_t final_diff;
  double sup_plus_i;
  double sup_minus_i;
  double sup_plus_ii;
  double sup_minus_ii;
} erwlab_pair_record;

typedef struct erwlab_pair_result erwlab_pair_result;

ERWLAB_API erwlab_status erwlab_pair_ensemble_run(const erwlab_params* params,
                                                  const erwlab_ensemble_config* cfg,
                                                  erwlab_pair_result** out);
ERWLAB_API void erwlab_pair_result_destroy(erwlab_pair_result* result);
ERWLAB_API size_t erwlab_pair_result_size(const erwlab_pair_result* result);
ERWLAB_API const int64_t* erwlab_pair_result_checkpoints(const erwlab_pair_result* result,
                                                         size_t* count);
ERWLAB_API erwlab_status erwlab_pair_result_record(const erwlab_pair_result* result,
                                                   size_t index, erwlab_pair_record* out);
/* Per-checkpoint raw and normalized differences of one replica. */
ERWLAB_API const int64_t* erwlab_pair_result_diffs(const erwlab_pair_result* result,
                                                   size_t index);
ERWLAB_API const double* erwlab_pair_result_normalized_diffs(const erwlab_pair_result* result,
                                                             size_t index);
ERWLAB_API void erwlab_pair_result_meeting_moments(const erwlab_pair_result* result,
                                                   erwlab_moments* out);

/* samples must hold cfg->replicas values. */
ERWLAB_API erwlab_status erwlab_limit_samples_run(const erwlab_params* params,
                                                  const erwlab_ensemble_config* cfg,
                                                  double* samples, erwlab_moments* moments);

/* ---- acceptance checks ------------------------------------------------ */

typedef struct erwlab_check_line {
  int32_t criterion;
  const char* suite;
  const char* name;
  double measured;
  double target;
  const char* condition;
  int32_t passed;
  int32_t informational;
  double seconds;
} erwlab_check_line;

typedef struct erwlab_check_report erwlab_check_report;

/* suite: oracle, clt, scaling, meeting, limit, lil, determinism or all.
 * replicas <= 0 keeps each check's own replica count. */
ERWLAB_API erwlab_status erwlab_check_run(const char* suite, uint64_t seed, int64_t replicas,
                                          int32_t workers, erwlab_check_report** out);
ERWLAB_API void erwlab_check_report_destroy(erwlab_check_report* report);
ERWLAB_API size_t erwlab_check_report_size(const erwlab_check_report* report);
ERWLAB_API erwlab_status erwlab_check_report_line(const erwlab_check_report* report,
                                                  size_t index, erwlab_check_line* out);
ERWLAB_API int32_t erwlab_check_report_passed(const erwlab_check_report* report);

#ifdef __cplusplus
}
#endif

#endif /* ERWLAB_H */
