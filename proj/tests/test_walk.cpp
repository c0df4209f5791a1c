#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "brute_force.hpp"
#include "erwlab/stats.hpp"
#include "erwlab/walk.hpp"

using namespace erwlab;

TEST_CASE("WalkParams validation") {
  CHECK_NOTHROW(WalkParams(0.5, 0.0));
  CHECK_NOTHROW(WalkParams(0.5, 1.0));
  CHECK_THROWS_AS(WalkParams(0.0), std::invalid_argument);
  CHECK_THROWS_AS(WalkParams(1.0), std::invalid_argument);
  CHECK_THROWS_AS(WalkParams(0.5, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(WalkParams(0.5, 1.1), std::invalid_argument);
  CHECK(WalkParams(0.6).s() == 0.5);
  CHECK(WalkParams::from_decimal("0.75").regime() == Regime::Marginal);
  CHECK(WalkParams::from_decimal("0.7500000000000000001").regime() == Regime::Superdiffusive);
}

TEST_CASE("WalkState invariants") {
  CHECK(WalkState{0, 0}.valid());
  CHECK(WalkState{3, -1}.valid());
  CHECK_FALSE(WalkState{3, 0}.valid());
  CHECK_FALSE(WalkState{2, 4}.valid());
  CHECK_FALSE(WalkState{0, 2}.valid());
  CHECK_THROWS_AS(HistoryWalkState({1, 0}), std::invalid_argument);
  HistoryWalkState h({1, 1, -1});
  CHECK(h.position() == 1);
  CHECK(h.n() == 3);
}

TEST_CASE("conditional_up_probability examples") {
  CHECK(conditional_up_probability(WalkParams(0.5, 0.5), {7, 3}) == 0.5);
  CHECK(conditional_up_probability(WalkParams(0.75, 0.5), {1, 1}) == doctest::Approx(0.75));
  CHECK(conditional_up_probability(WalkParams(0.6, 0.5), {4, 2}) == doctest::Approx(0.55));
  CHECK(conditional_up_probability(WalkParams(0.9, 0.3), {0, 0}) == 0.3);
  CHECK_THROWS_AS(conditional_up_probability(WalkParams(0.6), {4, 1}), std::invalid_argument);
}

TEST_CASE("conditional_up_probability matches the recall rule and is affine in S_n") {
  for (const double p : {0.1, 0.25, 0.5, 0.6, 0.75, 0.9}) {
    const WalkParams params(p);
    for (std::int64_t n = 1; n <= 40; ++n) {
      const double slope = (2.0 * p - 1.0) / (2.0 * static_cast<double>(n));
      for (std::int64_t ups = 0; ups <= n; ++ups) {
        const std::int64_t pos = 2 * ups - n;
        const double recall = (p * static_cast<double>(ups) +
                               (1.0 - p) * static_cast<double>(n - ups)) /
                              static_cast<double>(n);
        const double u = conditional_up_probability(params, {n, pos});
        CHECK(u == doctest::Approx(recall).epsilon(1e-14));
        CHECK(u == doctest::Approx(0.5 + slope * static_cast<double>(pos)).epsilon(1e-14));
        CHECK(u >= 0.0);
        CHECK(u <= 1.0);
      }
    }
  }
}

TEST_CASE("step: first step follows s") {
  const WalkParams params(0.6, 0.3);
  int ups = 0;
  constexpr int kTrials = 200000;
  for (int i = 0; i < kTrials; ++i) {
    RngStream rng(11, static_cast<std::uint64_t>(i));
    const WalkState next = step(params, {}, rng);
    CHECK(next.n == 1);
    if (next.position == 1) ++ups;
  }
  const double freq = static_cast<double>(ups) / kTrials;
  CHECK(std::abs(freq - 0.3) < 5.0 * std::sqrt(0.3 * 0.7 / kTrials));

  RngStream rng(1, 2);
  const WalkParams certain(0.6, 1.0);
  CHECK(step(certain, {}, rng) == WalkState{1, 1});
}

TEST_CASE("step: strong memory keeps the direction") {
  // With s = 1 and S_k = k, every up-probability equals p, so all 11 steps
  // are up with probability p^10.
  const WalkParams params(0.999, 1.0);
  const double exact = std::pow(0.999, 10);
  CHECK(exact >= 0.99);
  int straight = 0;
  constexpr int kTrials = 20000;
  for (int i = 0; i < kTrials; ++i) {
    RngStream rng(5, static_cast<std::uint64_t>(i));
    WalkState st;
    for (int k = 0; k < 11; ++k) st = step(params, st, rng);
    if (st.position == 11) ++straight;
  }
  const double freq = static_cast<double>(straight) / kTrials;
  CHECK(std::abs(freq - exact) < 5.0 * std::sqrt(exact * (1 - exact) / kTrials));
}

TEST_CASE("step: long simple walk stays in its tail bound") {
  const WalkParams params(0.5);
  RngStream rng(3, 0);
  WalkState st;
  for (int k = 0; k < 1000000; ++k) st = step(params, st, rng);
  CHECK(st.valid());
  CHECK(std::abs(st.position) <= 6000);
}

namespace {

double naive_up_frequency(const WalkParams& params, const std::vector<std::int8_t>& history,
                          int trials) {
  int ups = 0;
  RngStream rng(17, 0);
  for (int i = 0; i < trials; ++i) {
    HistoryWalkState h(history);
    step_naive(params, h, rng);
    if (h.steps().back() == 1) ++ups;
  }
  return static_cast<double>(ups) / trials;
}

}  // namespace

TEST_CASE("step_naive examples") {
  constexpr int kTrials = 400000;
  auto within = [](double freq, double prob) {
    return std::abs(freq - prob) < 5.0 * std::sqrt(prob * (1 - prob) / kTrials);
  };
  CHECK(within(naive_up_frequency(WalkParams(0.75), {1}, kTrials), 0.75));
  CHECK(within(naive_up_frequency(WalkParams(0.6), {1, 1, -1}, kTrials), 8.0 / 15.0));
  CHECK(within(naive_up_frequency(WalkParams(0.9), {1, -1}, kTrials), 0.5));

  HistoryWalkState empty;
  RngStream rng(1, 1);
  step_naive(WalkParams(0.6, 1.0), empty, rng);
  CHECK(empty.position() == 1);
}

TEST_CASE("step_naive and step induce the same law of S_n") {
  // Seeded Monte Carlo of the history sampler against the exhaustive
  // reference; the exact comparison lives in the acceptance suite.
  const WalkParams params(0.8, 0.5);
  constexpr int kN = 6;
  constexpr int kTrials = 200000;
  const auto law = testing::brute_force_law(0.8, 0.5, kN);
  std::map<int, int> naive_counts;
  std::map<int, int> fast_counts;
  RngStream rng_a(21, 0);
  RngStream rng_b(21, 1);
  for (int i = 0; i < kTrials; ++i) {
    HistoryWalkState h;
    WalkState st;
    for (int k = 0; k < kN; ++k) {
      step_naive(params, h, rng_a);
      st = step(params, st, rng_b);
    }
    ++naive_counts[static_cast<int>(h.position())];
    ++fast_counts[static_cast<int>(st.position)];
  }
  for (const auto& [k, prob] : law) {
    const double tol = 5.0 * std::sqrt(prob * (1 - prob) / kTrials) + 1e-9;
    CHECK(std::abs(naive_counts[k] / double(kTrials) - prob) < tol);
    CHECK(std::abs(fast_counts[k] / double(kTrials) - prob) < tol);
  }
}

TEST_CASE("simulate_path: parity, determinism and errors") {
  const WalkParams params(0.7);
  const std::vector<std::int64_t> cps{2, 4};
  RngStream a(99, 3);
  RngStream b(99, 3);
  const auto first = simulate_path(params, 4, cps, a);
  const auto second = simulate_path(params, 4, cps, b);
  REQUIRE(first.size() == 2);
  CHECK(first == second);
  for (const auto& st : first) CHECK(st.valid());
  CHECK(first[0].n == 2);
  CHECK(first[1].n == 4);

  RngStream c(1, 1);
  CHECK(simulate_path(params, 10, {}, c).empty());
  const std::vector<std::int64_t> bad_order{4, 2};
  const std::vector<std::int64_t> too_far{5};
  const std::vector<std::int64_t> zero{0};
  CHECK_THROWS_AS(simulate_path(params, 4, bad_order, c), std::invalid_argument);
  CHECK_THROWS_AS(simulate_path(params, 4, too_far, c), std::invalid_argument);
  CHECK_THROWS_AS(simulate_path(params, 4, zero, c), std::invalid_argument);
}

TEST_CASE("simulate_path: parity holds along random paths") {
  for (const double p : {0.2, 0.5, 0.75, 0.95}) {
    std::vector<std::int64_t> every(500);
    for (std::int64_t i = 0; i < 500; ++i) every[static_cast<std::size_t>(i)] = i + 1;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      RngStream rng(seed, 0);
      for (const auto& st : simulate_path(WalkParams(p, 0.5), 500, every, rng))
        REQUIRE(st.valid());
    }
  }
}

TEST_CASE("simulate_path: symmetric walk has mean zero") {
  const WalkParams params(0.5);
  const std::vector<std::int64_t> cps{100};
  StreamingMoments m;
  for (std::uint64_t r = 0; r < 10000; ++r) {
    RngStream rng(2024, r);
    m.add(static_cast<double>(simulate_path(params, 100, cps, rng)[0].position));
  }
  CHECK(std::abs(m.mean()) < 3.0 * m.standard_error());
}

TEST_CASE("simulate_path: all-up path at p = 0.99, s = 1") {
  const double p = 0.99;
  const WalkParams params(p, 1.0);
  const std::vector<std::int64_t> cps{20};
  const auto law = testing::brute_force_law(p, 1.0, 20);
  CHECK(law.at(20) == doctest::Approx(std::pow(p, 19)).epsilon(1e-12));
  int straight = 0;
  constexpr int kTrials = 20000;
  for (int r = 0; r < kTrials; ++r) {
    RngStream rng(8, static_cast<std::uint64_t>(r));
    if (simulate_path(params, 20, cps, rng)[0].position == 20) ++straight;
  }
  const double prob = law.at(20);
  CHECK(std::abs(straight / double(kTrials) - prob) < 5.0 * std::sqrt(prob * (1 - prob) / kTrials));
}

TEST_CASE("simulate_pair: forced first meeting when s = 1") {
  const WalkParams params(0.9, 1.0);
  for (std::uint64_t r = 0; r < 200; ++r) {
    RngStream a(4, 2 * r);
    RngStream b(4, 2 * r + 1);
    const PairRecord rec = simulate_pair(params, 200, {}, a, b, 16);
    CHECK(rec.meeting_count >= 1);
    CHECK(rec.last_meeting >= 1);
  }
}

TEST_CASE("simulate_pair: meeting statistics at small horizons") {
  constexpr int kTrials = 200000;
  int met_first = 0;
  StreamingMoments meetings;
  const WalkParams params(0.75, 0.5);
  for (int r = 0; r < kTrials; ++r) {
    RngStream a(12, 2 * static_cast<std::uint64_t>(r));
    RngStream b(12, 2 * static_cast<std::uint64_t>(r) + 1);
    const PairRecord rec = simulate_pair(params, 2, {}, a, b, 16);
    if (rec.meeting_count > 0 && (rec.last_meeting == 1 || rec.meeting_count == 2)) ++met_first;
    meetings.add(static_cast<double>(rec.meeting_count));
    CHECK((rec.meeting_count == 0) == (rec.last_meeting == 0));
    CHECK(rec.final_diff % 2 == 0);
  }
  CHECK(std::abs(met_first / double(kTrials) - 0.5) < 5.0 * std::sqrt(0.25 / kTrials));
  CHECK(std::abs(meetings.mean() - 0.84375) < 4.0 * meetings.standard_error());
}

TEST_CASE("simulate_pair: swapping the streams swaps the walks") {
  const WalkParams params(0.6);
  const std::vector<std::int64_t> cps{10, 500, 3000};
  RngStream a1(77, 10), b1(77, 11);
  RngStream a2(77, 11), b2(77, 10);
  const PairRecord x = simulate_pair(params, 3000, cps, a1, b1);
  const PairRecord y = simulate_pair(params, 3000, cps, a2, b2);
  CHECK(x.meeting_count == y.meeting_count);
  CHECK(x.last_meeting == y.last_meeting);
  CHECK(x.final_diff == -y.final_diff);
  for (std::size_t i = 0; i < cps.size(); ++i) CHECK(x.checkpoint_diffs[i] == -y.checkpoint_diffs[i]);
  CHECK(x.sup_plus_i == y.sup_minus_i);
  CHECK(x.sup_minus_i == y.sup_plus_i);
  CHECK(x.sup_plus_ii == y.sup_minus_ii);
}

TEST_CASE("simulate_pair: sup statistics agree with a direct running sup") {
  for (const double p : {0.3, 0.5, 0.75, 0.9}) {
    const WalkParams params(p);
    constexpr std::int64_t kHorizon = 20000;
    std::vector<std::int64_t> every(kHorizon);
    for (std::int64_t i = 0; i < kHorizon; ++i) every[static_cast<std::size_t>(i)] = i + 1;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      RngStream pa(seed, 0), pb(seed, 1);
      const auto path_a = simulate_path(params, kHorizon, every, pa);
      const auto path_b = simulate_path(params, kHorizon, every, pb);
      RunningSup sup_i([](std::int64_t n) { return std::sqrt(n * std::log(std::log(double(n)))); },
                       100);
      RunningSup sup_ii(
          [](std::int64_t n) {
            const double l = std::log(double(n));
            return std::sqrt(n * l * std::log(std::log(l)));
          },
          100);
      std::int64_t meetings = 0;
      for (std::size_t i = 0; i < every.size(); ++i) {
        const auto d = path_a[i].position - path_b[i].position;
        meetings += d == 0;
        sup_i.observe(every[i], static_cast<double>(d));
        sup_ii.observe(every[i], static_cast<double>(d));
      }
      RngStream ra(seed, 0), rb(seed, 1);
      const PairRecord rec = simulate_pair(params, kHorizon, {}, ra, rb, 100);
      CHECK(rec.meeting_count == meetings);
      CHECK(rec.sup_plus_i == doctest::Approx(sup_i.sup_plus()).epsilon(1e-12));
      CHECK(rec.sup_minus_i == doctest::Approx(sup_i.sup_minus()).epsilon(1e-12));
      CHECK(rec.sup_plus_ii == doctest::Approx(sup_ii.sup_plus()).epsilon(1e-12));
      CHECK(rec.sup_minus_ii == doctest::Approx(sup_ii.sup_minus()).epsilon(1e-12));
    }
  }
}

TEST_CASE("simulate_pair: normalized checkpoint differences") {
  const WalkParams params(0.85);
  const std::vector<std::int64_t> cps{1, 1000};
  RngStream a(5, 0), b(5, 1);
  const PairRecord rec = simulate_pair(params, 1000, cps, a, b);
  CHECK(rec.normalized_diffs[1] ==
        doctest::Approx(rec.checkpoint_diffs[1] / std::pow(1000.0, 0.7)));
  CHECK(rec.final_diff == rec.checkpoint_diffs[1]);

  const WalkParams marginal(0.75);
  RngStream c(5, 0), d(5, 1);
  const std::vector<std::int64_t> early{4, 100};
  const PairRecord m = simulate_pair(marginal, 100, early, c, d);
  CHECK(std::isnan(m.normalized_diffs[0]));
  CHECK_FALSE(std::isnan(m.normalized_diffs[1]));
  CHECK_THROWS_AS(simulate_pair(marginal, 100, early, c, d, 10), std::invalid_argument);
}
