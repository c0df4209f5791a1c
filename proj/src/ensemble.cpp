#include "erwlab/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>

#include "erwlab/errors.hpp"

namespace erwlab {

namespace {

constexpr std::size_t kReductionBlock = 64;

}  // namespace

void EnsembleConfig::validate() const {
  if (replicas < 1) throw std::invalid_argument("replicas must be >= 1");
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  if (workers < 1) throw std::invalid_argument("workers must be >= 1");
  if (n_min_lil < 16) throw std::invalid_argument("n_min_lil must be >= 16");
  validate_checkpoints(horizon, checkpoints);
  const double steps = static_cast<double>(horizon) * static_cast<double>(replicas);
  if (steps > step_budget)
    throw BudgetError("horizon * replicas = " + std::to_string(steps) +
                      " exceeds the step budget " + std::to_string(step_budget));
}

std::vector<std::int64_t> EnsembleConfig::effective_checkpoints() const {
  if (checkpoints.empty()) return {horizon};
  return checkpoints;
}

void parallel_for(std::int64_t count, int workers, const std::function<void(std::int64_t)>& body) {
  if (count <= 0) return;
  const auto threads = static_cast<std::int64_t>(std::max(1, workers));
  if (threads == 1) {
    for (std::int64_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto run = [&] {
    for (std::int64_t i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = count;
      }
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(static_cast<std::size_t>(std::min(threads, count)));
  for (std::int64_t t = 0; t < std::min(threads, count); ++t) pool.emplace_back(run);
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

StreamingMoments reduce_in_replica_order(std::span<const double> values) {
  std::vector<StreamingMoments> blocks;
  blocks.reserve(values.size() / kReductionBlock + 1);
  for (std::size_t start = 0; start < values.size(); start += kReductionBlock) {
    StreamingMoments acc;
    const std::size_t stop = std::min(values.size(), start + kReductionBlock);
    for (std::size_t i = start; i < stop; ++i) acc.add(values[i]);
    blocks.push_back(acc);
  }
  return tree_reduce(blocks);
}

WalkEnsembleResult run_walk_ensemble(const WalkParams& params, const EnsembleConfig& cfg) {
  cfg.validate();
  const auto checkpoints = cfg.effective_checkpoints();
  const auto replicas = static_cast<std::size_t>(cfg.replicas);
  const std::size_t ncp = checkpoints.size();

  // positions[c * replicas + r]
  std::vector<std::int64_t> positions(ncp * replicas);
  parallel_for(cfg.replicas, cfg.workers, [&](std::int64_t r) {
    RngStream rng(cfg.master_seed, static_cast<std::uint64_t>(r));
    const auto path = simulate_path(params, cfg.horizon, checkpoints, rng);
    for (std::size_t c = 0; c < ncp; ++c)
      positions[c * replicas + static_cast<std::size_t>(r)] = path[c].position;
  });

  WalkEnsembleResult out;
  std::vector<double> values(replicas);
  for (std::size_t c = 0; c < ncp; ++c) {
    CheckpointSummary summary;
    summary.n = checkpoints[c];
    const std::span<const std::int64_t> column(positions.data() + c * replicas, replicas);
    std::transform(column.begin(), column.end(), values.begin(),
                   [](std::int64_t x) { return static_cast<double>(x); });
    summary.raw = reduce_in_replica_order(values);
    std::transform(column.begin(), column.end(), values.begin(), [](std::int64_t x) {
      const auto d = static_cast<double>(x);
      return d * d;
    });
    summary.squared = reduce_in_replica_order(values);
    if (params.regime() == Regime::Marginal && summary.n < 2) {
      summary.normalizer = std::numeric_limits<double>::quiet_NaN();
    } else {
      summary.normalizer = walk_normalizer(params.regime(), params.p(), summary.n);
      std::transform(column.begin(), column.end(), values.begin(), [&](std::int64_t x) {
        return static_cast<double>(x) / summary.normalizer;
      });
      summary.normalized = reduce_in_replica_order(values);
    }
    out.checkpoints.push_back(summary);
  }
  const std::size_t last = (ncp - 1) * replicas;
  out.final_positions.assign(positions.begin() + static_cast<std::ptrdiff_t>(last),
                             positions.end());
  return out;
}

std::map<std::int64_t, std::int64_t> PairEnsembleResult::meeting_histogram() const {
  std::map<std::int64_t, std::int64_t> hist;
  for (const auto& rec : records) ++hist[rec.meeting_count];
  return hist;
}

std::vector<double> PairEnsembleResult::last_meetings() const {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& rec : records) out.push_back(static_cast<double>(rec.last_meeting));
  return out;
}

double PairEnsembleResult::fraction_last_meeting_after(std::int64_t t) const {
  if (records.empty()) return 0.0;
  const auto hits = std::count_if(records.begin(), records.end(),
                                  [t](const PairRecord& rec) { return rec.last_meeting > t; });
  return static_cast<double>(hits) / static_cast<double>(records.size());
}

std::vector<double> PairEnsembleResult::final_normalized_diffs() const {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& rec : records)
    out.push_back(rec.normalized_diffs.empty() ? std::numeric_limits<double>::quiet_NaN()
                                               : rec.normalized_diffs.back());
  return out;
}

PairEnsembleResult run_pair_ensemble(const WalkParams& params, const EnsembleConfig& cfg) {
  cfg.validate();
  PairEnsembleResult out;
  out.checkpoints = cfg.effective_checkpoints();
  out.records.resize(static_cast<std::size_t>(cfg.replicas));
  parallel_for(cfg.replicas, cfg.workers, [&](std::int64_t r) {
    const auto stream = 2 * static_cast<std::uint64_t>(r);
    RngStream rng_a(cfg.master_seed, stream);
    RngStream rng_b(cfg.master_seed, stream + 1);
    out.records[static_cast<std::size_t>(r)] =
        simulate_pair(params, cfg.horizon, out.checkpoints, rng_a, rng_b, cfg.n_min_lil);
  });
  std::vector<double> counts;
  counts.reserve(out.records.size());
  for (const auto& rec : out.records) counts.push_back(static_cast<double>(rec.meeting_count));
  out.meeting_count = reduce_in_replica_order(counts);
  return out;
}

LimitSamples estimate_limit_samples(const WalkParams& params, const EnsembleConfig& cfg) {
  if (params.regime() != Regime::Superdiffusive)
    throw RegimeError("limit samples of (S_N - S'_N)/N^(2p-1) need p > 3/4");
  cfg.validate();
  LimitSamples out;
  out.samples.resize(static_cast<std::size_t>(cfg.replicas));
  const double scale = diff_normalizer(params.regime(), params.p(), cfg.horizon);
  parallel_for(cfg.replicas, cfg.workers, [&](std::int64_t r) {
    const auto stream = 2 * static_cast<std::uint64_t>(r);
    RngStream rng_a(cfg.master_seed, stream);
    RngStream rng_b(cfg.master_seed, stream + 1);
    WalkState a;
    WalkState b;
    // Each walk consumes only its own stream, so running them one after the
    // other is identical to interleaving them as simulate_pair does.
    while (a.n < cfg.horizon) a = step(params, a, rng_a);
    while (b.n < cfg.horizon) b = step(params, b, rng_b);
    out.samples[static_cast<std::size_t>(r)] =
        static_cast<double>(a.position - b.position) / scale;
  });
  out.moments = reduce_in_replica_order(out.samples);
  return out;
}

}  // namespace erwlab
