#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "erwlab/stats.hpp"
#include "erwlab/walk.hpp"

namespace erwlab {

struct EnsembleConfig {
  static constexpr double kDefaultStepBudget = 1e10;

  std::int64_t replicas = 1;
  std::int64_t horizon = 1;
  /// Sorted steps in [1, horizon]; empty means {horizon}.
  std::vector<std::int64_t> checkpoints;
  std::uint64_t master_seed = 0;
  int workers = 1;
  /// First step of the LIL sup statistics.
  std::int64_t n_min_lil = 100;
  /// Upper bound on horizon * replicas.
  double step_budget = kDefaultStepBudget;

  /// Throws std::invalid_argument on malformed fields and BudgetError when
  /// horizon * replicas exceeds step_budget.
  void validate() const;
  std::vector<std::int64_t> effective_checkpoints() const;
};

struct CheckpointSummary {
  std::int64_t n = 0;
  /// walk_normalizer at n; NaN where the regime's normalizer is undefined.
  double normalizer = 0.0;
  StreamingMoments raw;         ///< S_n
  StreamingMoments squared;     ///< S_n^2
  StreamingMoments normalized;  ///< S_n / normalizer (empty when undefined)
};

struct WalkEnsembleResult {
  std::vector<CheckpointSummary> checkpoints;
  /// S_N per replica at the last checkpoint, in replica order.
  std::vector<std::int64_t> final_positions;
};

/// Replica r draws from stream r. Output is bit-identical for any worker count.
WalkEnsembleResult run_walk_ensemble(const WalkParams& params, const EnsembleConfig& cfg);

struct PairEnsembleResult {
  std::vector<std::int64_t> checkpoints;
  std::vector<PairRecord> records;  ///< replica order
  StreamingMoments meeting_count;

  /// meeting_count value -> number of pairs.
  std::map<std::int64_t, std::int64_t> meeting_histogram() const;
  std::vector<double> last_meetings() const;
  /// Fraction of pairs whose last meeting happened strictly after step t.
  double fraction_last_meeting_after(std::int64_t t) const;
  /// Normalized differences at the last checkpoint, replica order.
  std::vector<double> final_normalized_diffs() const;
};

/// Replica r drives its two walks from streams 2r and 2r + 1.
PairEnsembleResult run_pair_ensemble(const WalkParams& params, const EnsembleConfig& cfg);

struct LimitSamples {
  std::vector<double> samples;  ///< (S_N - S'_N) / N^(2p-1), replica order
  StreamingMoments moments;
};

/// Samples of the superdiffusive difference limit at N = cfg.horizon, using the
/// same streams as run_pair_ensemble. Throws RegimeError unless p > 3/4.
LimitSamples estimate_limit_samples(const WalkParams& params, const EnsembleConfig& cfg);

/// Runs body(i) for i in [0, count) on `workers` threads. Work is handed out
/// dynamically; callers write results by index.
void parallel_for(std::int64_t count, int workers, const std::function<void(std::int64_t)>& body);

/// Folds per-replica values into accumulators over fixed blocks of replicas
/// and merges the blocks with tree_reduce.
StreamingMoments reduce_in_replica_order(std::span<const double> values);

}  // namespace erwlab
