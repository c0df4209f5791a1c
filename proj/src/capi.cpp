#include "erwlab/erwlab.h"

#include <cmath>
#include <exception>
#include <limits>
#include <new>
#include <optional>
#include <string>
#include <vector>

#include "erwlab/checks.hpp"
#include "erwlab/ensemble.hpp"
#include "erwlab/errors.hpp"
#include "erwlab/oracle.hpp"
#include "erwlab/walk.hpp"

struct erwlab_params {
  erwlab::WalkParams value;
};

struct erwlab_walk {
  erwlab::WalkParams params;
  erwlab::RngStream rng;
  erwlab::WalkState state;
};

struct erwlab_pmf {
  erwlab::LatticePmf value;
};

struct erwlab_walk_result {
  erwlab::WalkEnsembleResult value;
};

struct erwlab_pair_result {
  erwlab::PairEnsembleResult value;
};

struct erwlab_check_report {
  std::vector<erwlab::CheckResult> lines;
};

namespace {

thread_local std::string g_last_error;

erwlab_status fail(erwlab_status status, const char* message) {
  g_last_error = message;
  return status;
}

// Runs body and maps the core's exception taxonomy onto status codes.
template <class Body>
erwlab_status guarded(Body&& body) noexcept {
  try {
    body();
    return ERWLAB_OK;
  } catch (const erwlab::BudgetError& e) {
    return fail(ERWLAB_ERR_BUDGET, e.what());
  } catch (const erwlab::RegimeError& e) {
    return fail(ERWLAB_ERR_REGIME, e.what());
  } catch (const erwlab::DomainError& e) {
    return fail(ERWLAB_ERR_DOMAIN, e.what());
  } catch (const std::domain_error& e) {
    return fail(ERWLAB_ERR_DOMAIN, e.what());
  } catch (const std::out_of_range& e) {
    return fail(ERWLAB_ERR_RANGE, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(ERWLAB_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(ERWLAB_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(ERWLAB_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(ERWLAB_ERR_INTERNAL, "unknown error");
  }
}

#define ERWLAB_REQUIRE(cond)                                                 \
  do {                                                                       \
    if (!(cond)) return fail(ERWLAB_ERR_INVALID_ARGUMENT, "null argument: " #cond); \
  } while (0)

erwlab::Regime to_core(erwlab_regime regime) {
  switch (regime) {
    case ERWLAB_DIFFUSIVE: return erwlab::Regime::Diffusive;
    case ERWLAB_MARGINAL: return erwlab::Regime::Marginal;
    case ERWLAB_SUPERDIFFUSIVE: return erwlab::Regime::Superdiffusive;
  }
  throw std::invalid_argument("unknown regime");
}

erwlab_regime to_c(erwlab::Regime regime) {
  switch (regime) {
    case erwlab::Regime::Diffusive: return ERWLAB_DIFFUSIVE;
    case erwlab::Regime::Marginal: return ERWLAB_MARGINAL;
    case erwlab::Regime::Superdiffusive: return ERWLAB_SUPERDIFFUSIVE;
  }
  return ERWLAB_DIFFUSIVE;
}

erwlab::OracleLimits limits_from(int64_t max_n) {
  erwlab::OracleLimits limits;
  if (max_n > 0) limits.max_n = max_n;
  return limits;
}

erwlab::EnsembleConfig config_from(const erwlab_ensemble_config& c) {
  erwlab::EnsembleConfig cfg;
  cfg.replicas = c.replicas;
  cfg.horizon = c.horizon;
  if (c.checkpoints != nullptr && c.checkpoint_count > 0)
    cfg.checkpoints.assign(c.checkpoints, c.checkpoints + c.checkpoint_count);
  cfg.master_seed = c.master_seed;
  cfg.workers = c.workers;
  cfg.n_min_lil = c.n_min_lil;
  cfg.step_budget = c.step_budget;
  return cfg;
}

erwlab_moments to_c(const erwlab::StreamingMoments& m) {
  return {m.count(), m.mean(), m.m2(), m.variance(), m.min(), m.max()};
}

}  // namespace

extern "C" {

const char* erwlab_version(void) { return "1.0.0"; }

const char* erwlab_rng_family(void) {
  static const std::string family(erwlab::RngStream::kFamily);
  return family.c_str();
}

const char* erwlab_last_error(void) { return g_last_error.c_str(); }

const char* erwlab_status_string(erwlab_status status) {
  switch (status) {
    case ERWLAB_OK: return "ok";
    case ERWLAB_ERR_INVALID_ARGUMENT: return "invalid argument";
    case ERWLAB_ERR_DOMAIN: return "domain error";
    case ERWLAB_ERR_RANGE: return "range error";
    case ERWLAB_ERR_BUDGET: return "step budget exceeded";
    case ERWLAB_ERR_REGIME: return "wrong regime";
    case ERWLAB_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* erwlab_regime_name(erwlab_regime regime) {
  switch (regime) {
    case ERWLAB_DIFFUSIVE: return "diffusive";
    case ERWLAB_MARGINAL: return "marginal";
    case ERWLAB_SUPERDIFFUSIVE: return "superdiffusive";
  }
  return "unknown";
}

erwlab_status erwlab_params_create(const char* p_decimal, double s, erwlab_params** out) {
  ERWLAB_REQUIRE(p_decimal != nullptr && out != nullptr);
  *out = nullptr;
  return guarded([&] {
    *out = new erwlab_params{erwlab::WalkParams::from_decimal(p_decimal, s)};
  });
}

void erwlab_params_destroy(erwlab_params* params) { delete params; }
double erwlab_params_p(const erwlab_params* params) { return params->value.p(); }
double erwlab_params_s(const erwlab_params* params) { return params->value.s(); }
erwlab_regime erwlab_params_regime(const erwlab_params* params) {
  return to_c(params->value.regime());
}

erwlab_status erwlab_conditional_up_probability(const erwlab_params* params, int64_t n,
                                                int64_t position, double* out) {
  ERWLAB_REQUIRE(params != nullptr && out != nullptr);
  return guarded([&] {
    *out = erwlab::conditional_up_probability(params->value, {n, position});
  });
}

erwlab_status erwlab_walk_normalizer(erwlab_regime regime, double p, int64_t n, double* out) {
  ERWLAB_REQUIRE(out != nullptr);
  return guarded([&] { *out = erwlab::walk_normalizer(to_core(regime), p, n); });
}

erwlab_status erwlab_diff_normalizer(erwlab_regime regime, double p, int64_t n, double* out) {
  ERWLAB_REQUIRE(out != nullptr);
  return guarded([&] { *out = erwlab::diff_normalizer(to_core(regime), p, n); });
}

erwlab_status erwlab_walk_create(const erwlab_params* params, uint64_t seed, uint64_t stream,
                                 erwlab_walk** out) {
  ERWLAB_REQUIRE(params != nullptr && out != nullptr);
  return guarded([&] {
    *out = new erwlab_walk{params->value, erwlab::RngStream(seed, stream), {}};
  });
}

void erwlab_walk_destroy(erwlab_walk* walk) { delete walk; }

erwlab_status erwlab_walk_advance(erwlab_walk* walk, int64_t steps) {
  ERWLAB_REQUIRE(walk != nullptr);
  if (steps < 0) return fail(ERWLAB_ERR_INVALID_ARGUMENT, "steps must be non-negative");
  for (int64_t i = 0; i < steps; ++i) walk->state = erwlab::step(walk->params, walk->state, walk->rng);
  return ERWLAB_OK;
}

void erwlab_walk_state(const erwlab_walk* walk, int64_t* n, int64_t* position) {
  if (n != nullptr) *n = walk->state.n;
  if (position != nullptr) *position = walk->state.position;
}

erwlab_status erwlab_oracle_pmf(const erwlab_params* params, int64_t n, int64_t max_n,
                                erwlab_pmf** out) {
  ERWLAB_REQUIRE(params != nullptr && out != nullptr);
  *out = nullptr;
  return guarded([&] {
    *out = new erwlab_pmf{erwlab::exact_pmf(params->value, n, limits_from(max_n))};
  });
}

erwlab_status erwlab_oracle_diff_pmf(const erwlab_params* params, int64_t n, int64_t max_n,
                                     erwlab_pmf** out) {
  ERWLAB_REQUIRE(params != nullptr && out != nullptr);
  *out = nullptr;
  return guarded([&] {
    *out = new erwlab_pmf{erwlab::exact_diff_pmf(params->value, n, limits_from(max_n))};
  });
}

void erwlab_pmf_destroy(erwlab_pmf* pmf) { delete pmf; }
int64_t erwlab_pmf_n(const erwlab_pmf* pmf) { return pmf->value.n(); }
int64_t erwlab_pmf_lo(const erwlab_pmf* pmf) { return pmf->value.lo(); }
size_t erwlab_pmf_size(const erwlab_pmf* pmf) { return pmf->value.probs().size(); }
const double* erwlab_pmf_probs(const erwlab_pmf* pmf) { return pmf->value.probs().data(); }

erwlab_status erwlab_oracle_moments(const erwlab_params* params, int64_t n_max, double* means,
                                    double* second_moments) {
  ERWLAB_REQUIRE(params != nullptr);
  return guarded([&] {
    const auto series = erwlab::moment_series(params->value, n_max);
    for (std::size_t i = 0; i < series.means.size(); ++i) {
      if (means != nullptr) means[i] = series.means[i];
      if (second_moments != nullptr) second_moments[i] = series.second_moments[i];
    }
  });
}

erwlab_status erwlab_oracle_meeting_series(const erwlab_params* params, int64_t n_max,
                                           int64_t max_n, double* out) {
  ERWLAB_REQUIRE(params != nullptr && out != nullptr);
  return guarded([&] {
    const auto q = erwlab::meeting_probability_series(params->value, n_max, limits_from(max_n));
    std::copy(q.begin(), q.end(), out);
  });
}

erwlab_status erwlab_oracle_expected_meetings(const erwlab_params* params, int64_t horizon,
                                              int64_t max_n, erwlab_meeting_extrapolation* out) {
  ERWLAB_REQUIRE(params != nullptr && out != nullptr);
  return guarded([&] {
    const auto e =
        erwlab::extrapolate_expected_meetings(params->value, horizon, limits_from(max_n));
    *out = {e.horizon,      e.cap,       e.exact_part, e.tail_part, e.total(),
            e.fit_constant, e.window_lo, e.window_hi};
  });
}

void erwlab_ensemble_config_init(erwlab_ensemble_config* cfg) {
  if (cfg == nullptr) return;
  const erwlab::EnsembleConfig defaults;
  *cfg = {defaults.replicas, defaults.horizon,   nullptr,
          0,                 defaults.master_seed, defaults.workers,
          defaults.n_min_lil, defaults.step_budget};
}

erwlab_status erwlab_walk_ensemble_run(const erwlab_params* params,
                                       const erwlab_ensemble_config* cfg,
                                       erwlab_walk_result** out) {
  ERWLAB_REQUIRE(params != nullptr && cfg != nullptr && out != nullptr);
  *out = nullptr;
  return guarded([&] {
    *out = new erwlab_walk_result{erwlab::run_walk_ensemble(params->value, config_from(*cfg))};
  });
}

void erwlab_walk_result_destroy(erwlab_walk_result* result) { delete result; }

size_t erwlab_walk_result_checkpoint_count(const erwlab_walk_result* result) {
  return result->value.checkpoints.size();
}

erwlab_status erwlab_walk_result_checkpoint(const erwlab_walk_result* result, size_t index,
                                            int64_t* n, double* normalizer, erwlab_moments* raw,
                                            erwlab_moments* squared,
                                            erwlab_moments* normalized) {
  ERWLAB_REQUIRE(result != nullptr);
  if (index >= result->value.checkpoints.size())
    return fail(ERWLAB_ERR_RANGE, "checkpoint index out of range");
  const auto& cp = result->value.checkpoints[index];
  if (n != nullptr) *n = cp.n;
  if (normalizer != nullptr) *normalizer = cp.normalizer;
  if (raw != nullptr) *raw = to_c(cp.raw);
  if (squared != nullptr) *squared = to_c(cp.squared);
  if (normalized != nullptr) *normalized = to_c(cp.normalized);
  return ERWLAB_OK;
}

const int64_t* erwlab_walk_result_final_positions(const erwlab_walk_result* result,
                                                  size_t* count) {
  if (count != nullptr) *count = result->value.final_positions.size();
  return result->value.final_positions.data();
}

erwlab_status erwlab_pair_ensemble_run(const erwlab_params* params,
                                       const erwlab_ensemble_config* cfg,
                                       erwlab_pair_result** out) {
  ERWLAB_REQUIRE(params != nullptr && cfg != nullptr && out != nullptr);
  *out = nullptr;
  return guarded([&] {
    *out = new erwlab_pair_result{erwlab::run_pair_ensemble(params->value, config_from(*cfg))};
  });
}

void erwlab_pair_result_destroy(erwlab_pair_result* result) { delete result; }

size_t erwlab_pair_result_size(const erwlab_pair_result* result) {
  return result->value.records.size();
}

const int64_t* erwlab_pair_result_checkpoints(const erwlab_pair_result* result, size_t* count) {
  if (count != nullptr) *count = result->value.checkpoints.size();
  return result->value.checkpoints.data();
}

erwlab_status erwlab_pair_result_record(const erwlab_pair_result* result, size_t index,
                                        erwlab_pair_record* out) {
  ERWLAB_REQUIRE(result != nullptr && out != nullptr);
  if (index >= result->value.records.size())
    return fail(ERWLAB_ERR_RANGE, "replica index out of range");
  const auto& r = result->value.records[index];
  *out = {r.meeting_count, r.last_meeting, r.final_diff, r.sup_plus_i,
          r.sup_minus_i,   r.sup_plus_ii,  r.sup_minus_ii};
  return ERWLAB_OK;
}

const int64_t* erwlab_pair_result_diffs(const erwlab_pair_result* result, size_t index) {
  if (index >= result->value.records.size()) return nullptr;
  return result->value.records[index].checkpoint_diffs.data();
}

const double* erwlab_pair_result_normalized_diffs(const erwlab_pair_result* result,
                                                  size_t index) {
  if (index >= result->value.records.size()) return nullptr;
  return result->value.records[index].normalized_diffs.data();
}

void erwlab_pair_result_meeting_moments(const erwlab_pair_result* result, erwlab_moments* out) {
  if (out != nullptr) *out = to_c(result->value.meeting_count);
}

erwlab_status erwlab_limit_samples_run(const erwlab_params* params,
                                       const erwlab_ensemble_config* cfg, double* samples,
                                       erwlab_moments* moments) {
  ERWLAB_REQUIRE(params != nullptr && cfg != nullptr);
  return guarded([&] {
    const auto limit = erwlab::estimate_limit_samples(params->value, config_from(*cfg));
    if (samples != nullptr) std::copy(limit.samples.begin(), limit.samples.end(), samples);
    if (moments != nullptr) *moments = to_c(limit.moments);
  });
}

erwlab_status erwlab_check_run(const char* suite, uint64_t seed, int64_t replicas,
                               int32_t workers, erwlab_check_report** out) {
  ERWLAB_REQUIRE(suite != nullptr && out != nullptr);
  *out = nullptr;
  return guarded([&] {
    erwlab::CheckOptions options;
    options.seed = seed;
    options.replicas = replicas > 0 ? replicas : 0;
    options.workers = workers > 0 ? workers : 1;
    *out = new erwlab_check_report{erwlab::run_check_suite(suite, options)};
  });
}

void erwlab_check_report_destroy(erwlab_check_report* report) { delete report; }

size_t erwlab_check_report_size(const erwlab_check_report* report) {
  return report->lines.size();
}

erwlab_status erwlab_check_report_line(const erwlab_check_report* report, size_t index,
                                       erwlab_check_line* out) {
  ERWLAB_REQUIRE(report != nullptr && out != nullptr);
  if (index >= report->lines.size()) return fail(ERWLAB_ERR_RANGE, "line index out of range");
  const auto& l = report->lines[index];
  *out = {l.criterion,         l.suite.c_str(),    l.name.c_str(),
          l.measured,          l.target,           l.condition.c_str(),
          l.passed ? 1 : 0,    l.informational ? 1 : 0, l.seconds};
  return ERWLAB_OK;
}

int32_t erwlab_check_report_passed(const erwlab_check_report* report) {
  return erwlab::all_passed(report->lines) ? 1 : 0;
}

}  // extern "C"
