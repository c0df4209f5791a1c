#include <doctest.h>

#include <cmath>
#include <cstring>
#include <stdexcept>

#include "erwlab/ensemble.hpp"
#include "erwlab/errors.hpp"
#include "erwlab/oracle.hpp"

using namespace erwlab;

namespace {

EnsembleConfig small_config(std::int64_t replicas, std::int64_t horizon, std::uint64_t seed = 1) {
  EnsembleConfig cfg;
  cfg.replicas = replicas;
  cfg.horizon = horizon;
  cfg.master_seed = seed;
  return cfg;
}

bool bit_equal(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST_CASE("EnsembleConfig validation") {
  EnsembleConfig cfg = small_config(10, 100);
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.effective_checkpoints() == std::vector<std::int64_t>{100});

  auto broken = cfg;
  broken.replicas = 0;
  CHECK_THROWS_AS(broken.validate(), std::invalid_argument);
  broken = cfg;
  broken.n_min_lil = 15;
  CHECK_THROWS_AS(broken.validate(), std::invalid_argument);
  broken = cfg;
  broken.checkpoints = {50, 101};
  CHECK_THROWS_AS(broken.validate(), std::invalid_argument);
  broken = cfg;
  broken.workers = 0;
  CHECK_THROWS_AS(broken.validate(), std::invalid_argument);

  broken = cfg;
  broken.step_budget = 999;
  CHECK_THROWS_AS(broken.validate(), BudgetError);
  CHECK_THROWS_AS(run_walk_ensemble(WalkParams(0.5), broken), BudgetError);
  CHECK_THROWS_AS(run_pair_ensemble(WalkParams(0.5), broken), BudgetError);

  EnsembleConfig huge = small_config(100000, 1000000);
  CHECK_THROWS_AS(huge.validate(), BudgetError);
}

TEST_CASE("walk ensemble is bit-identical across worker counts") {
  for (const double p : {0.3, 0.75, 0.9}) {
    EnsembleConfig cfg = small_config(301, 3000, 99);
    cfg.checkpoints = {1, 10, 1500, 3000};
    cfg.workers = 1;
    const auto one = run_walk_ensemble(WalkParams(p), cfg);
    for (const int workers : {2, 4, 13}) {
      cfg.workers = workers;
      const auto many = run_walk_ensemble(WalkParams(p), cfg);
      CHECK(many.final_positions == one.final_positions);
      for (std::size_t c = 0; c < one.checkpoints.size(); ++c) {
        const auto& a = one.checkpoints[c];
        const auto& b = many.checkpoints[c];
        CHECK(bit_equal(a.raw.mean(), b.raw.mean()));
        CHECK(bit_equal(a.raw.m2(), b.raw.m2()));
        CHECK(bit_equal(a.squared.mean(), b.squared.mean()));
        CHECK(bit_equal(a.normalized.m2(), b.normalized.m2()));
      }
    }
  }
}

TEST_CASE("walk ensemble: replica r uses stream r") {
  const WalkParams params(0.65);
  EnsembleConfig cfg = small_config(20, 500, 31);
  const auto result = run_walk_ensemble(params, cfg);
  for (std::uint64_t r = 0; r < 20; ++r) {
    RngStream rng(31, r);
    const std::vector<std::int64_t> cps{500};
    CHECK(simulate_path(params, 500, cps, rng)[0].position == result.final_positions[r]);
  }
}

TEST_CASE("walk ensemble second moment agrees with the oracle") {
  for (const double p : {0.2, 0.5, 0.6, 0.75, 0.85}) {
    const WalkParams params(p);
    EnsembleConfig cfg = small_config(4000, 2000, 5);
    cfg.checkpoints = {100, 2000};
    const auto result = run_walk_ensemble(params, cfg);
    for (const auto& cp : result.checkpoints) {
      const double exact = exact_second_moment(params, cp.n);
      CHECK(std::abs(cp.squared.mean() - exact) <= 4.0 * cp.squared.standard_error());
      CHECK(std::abs(cp.raw.mean()) <= 4.0 * cp.raw.standard_error());
      CHECK(cp.normalizer == doctest::Approx(walk_normalizer(params.regime(), p, cp.n)));
    }
  }
}

TEST_CASE("walk ensemble: marginal normalizer undefined at n = 1") {
  EnsembleConfig cfg = small_config(50, 10);
  cfg.checkpoints = {1, 10};
  const auto result = run_walk_ensemble(WalkParams(0.75), cfg);
  CHECK(std::isnan(result.checkpoints[0].normalizer));
  CHECK(result.checkpoints[0].normalized.count() == 0);
  CHECK(result.checkpoints[1].normalized.count() == 50);
}

TEST_CASE("pair ensemble") {
  const WalkParams sure(0.9, 1.0);
  const auto forced = run_pair_ensemble(sure, small_config(100, 1000));
  for (const auto& rec : forced.records) CHECK(rec.meeting_count >= 1);
  CHECK(forced.meeting_histogram().count(0) == 0);

  const WalkParams params(0.6);
  EnsembleConfig cfg = small_config(64, 2000, 8);
  cfg.checkpoints = {500, 2000};
  const auto one = run_pair_ensemble(params, cfg);
  cfg.workers = 4;
  const auto four = run_pair_ensemble(params, cfg);
  REQUIRE(one.records.size() == 64);
  for (std::size_t i = 0; i < one.records.size(); ++i) {
    CHECK(one.records[i].meeting_count == four.records[i].meeting_count);
    CHECK(one.records[i].checkpoint_diffs == four.records[i].checkpoint_diffs);
    CHECK(bit_equal(one.records[i].sup_plus_i, four.records[i].sup_plus_i));
  }
  // Replica r runs on streams (2r, 2r+1).
  RngStream a(8, 6), b(8, 7);
  const PairRecord direct = simulate_pair(params, 2000, cfg.checkpoints, a, b, cfg.n_min_lil);
  CHECK(direct.final_diff == one.records[3].final_diff);
  CHECK(direct.last_meeting == one.records[3].last_meeting);

  std::int64_t total = 0;
  for (const auto& [count, pairs] : one.meeting_histogram()) total += pairs;
  CHECK(total == 64);
  CHECK(one.last_meetings().size() == 64);
  CHECK(one.fraction_last_meeting_after(0) >= one.fraction_last_meeting_after(1000));
  CHECK(one.final_normalized_diffs().size() == 64);
}

TEST_CASE("pair ensemble mean meetings agree with the oracle at small horizons") {
  for (const double p : {0.5, 0.75, 0.9}) {
    const WalkParams params(p);
    const auto result = run_pair_ensemble(params, small_config(4000, 400, 3));
    const double expected = expected_meetings(params, 400);
    CHECK(std::abs(result.meeting_count.mean() - expected) <=
          4.0 * result.meeting_count.standard_error());
  }
}

TEST_CASE("estimate_limit_samples") {
  CHECK_THROWS_AS(estimate_limit_samples(WalkParams(0.6), small_config(10, 100)), RegimeError);
  CHECK_THROWS_AS(estimate_limit_samples(WalkParams(0.75), small_config(10, 100)), RegimeError);

  const WalkParams params(0.85);
  EnsembleConfig cfg = small_config(1500, 5000, 4);
  const auto limit = estimate_limit_samples(params, cfg);
  REQUIRE(limit.samples.size() == 1500);
  CHECK(std::abs(limit.moments.mean()) <= 4.0 * limit.moments.standard_error());
  const double target =
      2.0 * exact_second_moment(params, 5000) / std::pow(5000.0, 4.0 * 0.85 - 2.0);
  CHECK(limit.moments.variance() == doctest::Approx(target).epsilon(0.15));

  // Same streams as the pair ensemble.
  const auto pairs = run_pair_ensemble(params, small_config(5, 5000, 4));
  for (std::size_t i = 0; i < 5; ++i)
    CHECK(limit.samples[i] ==
          doctest::Approx(pairs.records[i].final_diff / std::pow(5000.0, 0.7)));

  cfg.workers = 3;
  const auto threaded = estimate_limit_samples(params, cfg);
  CHECK(threaded.samples == limit.samples);
  CHECK(bit_equal(threaded.moments.m2(), limit.moments.m2()));
}

TEST_CASE("parallel_for propagates exceptions") {
  CHECK_THROWS_AS(parallel_for(100, 4,
                               [](std::int64_t i) {
                                 if (i == 37) throw std::runtime_error("boom");
                               }),
                  std::runtime_error);
  std::vector<int> hits(1000, 0);
  parallel_for(1000, 8, [&](std::int64_t i) { hits[static_cast<std::size_t>(i)] += 1; });
  for (const int h : hits) CHECK(h == 1);
}

TEST_CASE("reduce_in_replica_order is independent of completion order") {
  std::vector<double> values(1000);
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = std::sin(double(i)) * 1e3;
  const auto a = reduce_in_replica_order(values);
  const auto b = reduce_in_replica_order(values);
  CHECK(bit_equal(a.m2(), b.m2()));
  StreamingMoments seq;
  for (const double v : values) seq.add(v);
  CHECK(a.variance() == doctest::Approx(seq.variance()).epsilon(1e-12));
}
