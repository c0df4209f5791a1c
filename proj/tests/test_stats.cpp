#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "erwlab/stats.hpp"

using namespace erwlab;

namespace {

StreamingMoments of(const std::vector<double>& xs) {
  StreamingMoments m;
  for (const double x : xs) m.add(x);
  return m;
}

bool close(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

bool same(const StreamingMoments& a, const StreamingMoments& b, double rel = 1e-9) {
  return a.count() == b.count() && close(a.mean(), b.mean(), rel) && close(a.m2(), b.m2(), rel) &&
         a.min() == b.min() && a.max() == b.max();
}

}  // namespace

TEST_CASE("moments_update") {
  const StreamingMoments one = moments_update({}, 3.0);
  CHECK(one.count() == 1);
  CHECK(one.mean() == 3.0);
  CHECK(one.m2() == 0.0);

  const StreamingMoments three = of({1, 2, 3});
  CHECK(three.mean() == 2.0);
  CHECK(three.variance() == 1.0);
  CHECK(three.min() == 1.0);
  CHECK(three.max() == 3.0);

  StreamingMoments alt;
  for (int i = 0; i < 1000000; ++i) alt.add(i % 2 == 0 ? 1.0 : -1.0);
  CHECK(std::abs(alt.mean()) < 1e-12);
  CHECK(alt.variance() == doctest::Approx(1e6 / (1e6 - 1.0)).epsilon(1e-12));
}

TEST_CASE("moments_merge") {
  const StreamingMoments x = of({4, 7, 1, 9});
  CHECK(same(moments_merge(x, {}), x, 0.0));
  CHECK(same(moments_merge({}, x), x, 0.0));
  CHECK(same(moments_merge(of({1, 2}), of({3})), of({1, 2, 3})));

  std::mt19937_64 gen(42);
  std::normal_distribution<double> normal;
  std::vector<double> data(100000);
  for (auto& v : data) v = normal(gen);
  const StreamingMoments seq = of(data);
  std::uniform_int_distribution<std::size_t> cut(1, data.size() - 1);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t k = cut(gen);
    const StreamingMoments left = of({data.begin(), data.begin() + static_cast<std::ptrdiff_t>(k)});
    const StreamingMoments right = of({data.begin() + static_cast<std::ptrdiff_t>(k), data.end()});
    const StreamingMoments merged = moments_merge(left, right);
    CHECK(std::abs(merged.variance() / seq.variance() - 1.0) <= 1e-9);
    CHECK(same(merged, seq));
  }
}

TEST_CASE("moments_merge is commutative and associative") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(-100.0, 100.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<StreamingMoments> parts(3);
    for (auto& part : parts) {
      const int len = static_cast<int>(gen() % 50);
      for (int i = 0; i < len; ++i) part.add(u(gen));
    }
    CHECK(same(moments_merge(parts[0], parts[1]), moments_merge(parts[1], parts[0])));
    CHECK(same(moments_merge(moments_merge(parts[0], parts[1]), parts[2]),
               moments_merge(parts[0], moments_merge(parts[1], parts[2]))));
  }
}

TEST_CASE("tree_reduce matches sequential accumulation") {
  std::vector<StreamingMoments> leaves(37);
  std::vector<double> all;
  std::mt19937_64 gen(3);
  std::normal_distribution<double> normal(5.0, 2.0);
  for (auto& leaf : leaves) {
    for (int i = 0; i < 11; ++i) {
      const double v = normal(gen);
      leaf.add(v);
      all.push_back(v);
    }
  }
  CHECK(same(tree_reduce(leaves), of(all)));
  CHECK(tree_reduce({}).count() == 0);
}

TEST_CASE("variance_ci") {
  StreamingMoments m;
  for (int i = 0; i < 10000; ++i) m.add(i % 2 == 0 ? 1.0 : -1.0);
  // variance = 10000/9999; scale back to 1 for the frozen interval.
  const Interval ci = variance_ci(m, 0.95);
  const double v = m.variance();
  CHECK(ci.lo / v == doctest::Approx(0.9723).epsilon(1e-4));
  CHECK(ci.hi / v == doctest::Approx(1.0277).epsilon(1e-4));

  const Interval point = variance_ci(m, 0.0);
  CHECK(point.lo == v);
  CHECK(point.hi == v);

  StreamingMoments flat;
  for (int i = 0; i < 40; ++i) flat.add(2.5);
  const Interval zero = variance_ci(flat, 0.99);
  CHECK(zero.lo == 0.0);
  CHECK(zero.hi == 0.0);

  StreamingMoments few;
  for (int i = 0; i < 29; ++i) few.add(i);
  CHECK_THROWS_AS(variance_ci(few, 0.95), std::invalid_argument);
}

TEST_CASE("variance_ci width shrinks as 1/sqrt(count)") {
  auto width = [](int count) {
    StreamingMoments m;
    for (int i = 0; i < count; ++i) m.add(i % 2 == 0 ? 1.0 : -1.0);
    const Interval ci = variance_ci(m, 0.95);
    return (ci.hi - ci.lo) / m.variance();
  };
  CHECK(width(1001) / width(4001) == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(width(101) / width(10001) == doctest::Approx(10.0).epsilon(1e-2));
}

TEST_CASE("normal helpers") {
  CHECK(normal_cdf(0.0) == 0.5);
  CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-12));
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
  CHECK_THROWS(normal_quantile(1.0));
}

TEST_CASE("ks_statistic") {
  constexpr int kN = 1000;
  std::vector<double> ideal(kN);
  for (int i = 0; i < kN; ++i) ideal[static_cast<std::size_t>(i)] = normal_quantile((i + 0.5) / kN);
  const KsResult r = ks_statistic(ideal, normal_cdf);
  CHECK(r.statistic == doctest::Approx(0.5 / kN).epsilon(1e-9));
  CHECK_FALSE(r.reject());

  const std::vector<double> flat(50, 0.0);
  CHECK(ks_statistic(flat, normal_cdf).statistic == doctest::Approx(0.5));

  std::mt19937_64 gen(20240611);
  std::normal_distribution<double> normal;
  std::vector<double> sample(5000);
  for (auto& v : sample) v = normal(gen);
  std::sort(sample.begin(), sample.end());
  const KsResult ok = ks_statistic(sample, normal_cdf);
  CHECK(ok.threshold == doctest::Approx(1.628 / std::sqrt(5000.0)));
  CHECK(ok.threshold == doctest::Approx(0.02302).epsilon(1e-3));
  CHECK(ok.statistic < ok.threshold);
  CHECK(ok.statistic >= 0.0);
  CHECK(ok.statistic <= 1.0);

  // A shifted normal is rejected.
  for (auto& v : sample) v += 0.2;
  CHECK(ks_statistic(sample, normal_cdf).reject());

  std::vector<double> unsorted{3, 1, 2, 4, 5, 6, 7, 8, 9, 10};
  CHECK_THROWS_AS(ks_statistic(unsorted, normal_cdf), std::invalid_argument);
  std::vector<double> tiny{1, 2, 3};
  CHECK_THROWS_AS(ks_statistic(tiny, normal_cdf), std::invalid_argument);
  CHECK(ks_threshold(10000, 0.05) == doctest::Approx(0.01358));
}

TEST_CASE("ks_statistic is invariant under joint increasing transforms") {
  std::mt19937_64 gen(99);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> sample(300);
    for (auto& v : sample) v = normal(gen) * 1.1 + 0.05;
    std::sort(sample.begin(), sample.end());
    std::vector<double> mapped(sample);
    for (auto& v : mapped) v = std::exp(v);
    const double d1 = ks_statistic(sample, normal_cdf).statistic;
    const double d2 =
        ks_statistic(mapped, [](double y) { return normal_cdf(std::log(y)); }).statistic;
    CHECK(d1 == doctest::Approx(d2).epsilon(1e-12));
  }
}

TEST_CASE("fit_power_law") {
  std::vector<std::pair<double, double>> pts;
  for (double n = 1; n <= 1000; n *= 1.5) pts.emplace_back(n, 4.0 * n * n);
  const PowerLawFit fit = fit_power_law(pts, 1, 1000);
  CHECK(std::abs(fit.slope - 2.0) <= 1e-12);
  CHECK(std::abs(fit.intercept - std::log(4.0)) <= 1e-12);
  CHECK(fit.rss <= 1e-20);

  for (const double exponent : {-0.5, 0.4, 1.4, 3.0}) {
    std::vector<std::pair<double, double>> pure;
    for (double n = 10; n <= 1e6; n *= 1.7) pure.emplace_back(n, 0.3 * std::pow(n, exponent));
    CHECK(std::abs(fit_power_law(pure, 1, 1e7).slope - exponent) <= 1e-12);
  }

  std::vector<std::pair<double, double>> flat{{1, 5}, {2, 5}, {3, 5}, {4, 5}};
  CHECK(std::abs(fit_power_law(flat, 1, 4).slope) <= 1e-15);

  std::vector<std::pair<double, double>> bad{{1, 1}, {2, 0}, {3, 1}};
  CHECK_THROWS_AS(fit_power_law(bad, 1, 3), std::domain_error);
  CHECK_THROWS_AS(fit_power_law(pts, 1, 2), std::invalid_argument);
}

TEST_CASE("running_sup") {
  auto norm = [](std::int64_t n) { return std::sqrt(double(n)); };
  std::vector<std::pair<std::int64_t, double>> zeros;
  for (std::int64_t n = 1; n <= 100; ++n) zeros.emplace_back(n, 0.0);
  const auto [zp, zm] = running_sup(zeros, norm, 16);
  CHECK(zp == 0.0);
  CHECK(zm == 0.0);

  std::vector<std::pair<std::int64_t, double>> spike = zeros;
  spike[63].second = 8.0;  // n = 64, normalizer 8
  const auto [sp, sm] = running_sup(spike, norm, 16);
  CHECK(sp == 1.0);
  CHECK(sm == 0.0);

  // Values before n_min are ignored.
  std::vector<std::pair<std::int64_t, double>> early = zeros;
  early[3].second = -100.0;
  CHECK(running_sup(early, norm, 16).second == 0.0);

  CHECK_THROWS(RunningSup([](std::int64_t) -> double { throw std::domain_error("x"); }, 16));
}

TEST_CASE("running_sup is monotone in the stream prefix") {
  std::mt19937_64 gen(1);
  std::normal_distribution<double> normal;
  RunningSup sup([](std::int64_t n) { return std::sqrt(double(n)); }, 16);
  double last_plus = -INFINITY;
  double last_minus = -INFINITY;
  double walk = 0.0;
  for (std::int64_t n = 1; n <= 5000; ++n) {
    walk += normal(gen);
    sup.observe(n, walk);
    CHECK(sup.sup_plus() >= last_plus);
    CHECK(sup.sup_minus() >= last_minus);
    last_plus = sup.sup_plus();
    last_minus = sup.sup_minus();
  }
}

TEST_CASE("empirical_quantile") {
  const std::vector<double> xs{4, 1, 3, 2};
  CHECK(empirical_quantile(xs, 0.5) == 2.0);
  CHECK(empirical_quantile(xs, 1.0) == 4.0);
  CHECK(empirical_quantile(xs, 0.0) == 1.0);
  CHECK(empirical_quantile(xs, 0.26) == 2.0);
  CHECK_THROWS_AS(empirical_quantile({}, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(empirical_quantile(xs, 1.5), std::invalid_argument);
}
