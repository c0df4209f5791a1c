#include "erwlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/distributions/normal.hpp>

namespace erwlab {

void StreamingMoments::add(double x) noexcept {
  ++count_;
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(count_);
  m2_ += delta * (x - mean_);
  min_ = std::min(min_, x);
  max_ = std::max(max_, x);
}

void StreamingMoments::merge(const StreamingMoments& other) noexcept {
  if (other.count_ == 0) return;
  if (count_ == 0) {
    *this = other;
    return;
  }
  const auto na = static_cast<double>(count_);
  const auto nb = static_cast<double>(other.count_);
  const double n = na + nb;
  const double delta = other.mean_ - mean_;
  mean_ += delta * nb / n;
  m2_ += other.m2_ + delta * delta * na * nb / n;
  count_ += other.count_;
  min_ = std::min(min_, other.min_);
  max_ = std::max(max_, other.max_);
}

double StreamingMoments::variance() const noexcept {
  return count_ < 2 ? 0.0 : m2_ / static_cast<double>(count_ - 1);
}

double StreamingMoments::stddev() const noexcept { return std::sqrt(variance()); }

double StreamingMoments::standard_error() const noexcept {
  return count_ < 1 ? 0.0 : stddev() / std::sqrt(static_cast<double>(count_));
}

StreamingMoments moments_update(StreamingMoments acc, double x) noexcept {
  acc.add(x);
  return acc;
}

StreamingMoments moments_merge(StreamingMoments a, const StreamingMoments& b) noexcept {
  a.merge(b);
  return a;
}

StreamingMoments tree_reduce(std::span<const StreamingMoments> leaves) {
  if (leaves.empty()) return {};
  if (leaves.size() == 1) return leaves.front();
  const std::size_t half = leaves.size() / 2;
  return moments_merge(tree_reduce(leaves.first(half)), tree_reduce(leaves.subspan(half)));
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_quantile(double q) {
  if (!(q > 0.0 && q < 1.0)) throw std::domain_error("normal quantile needs q in (0, 1)");
  return boost::math::quantile(boost::math::normal_distribution<double>(), q);
}

Interval variance_ci(const StreamingMoments& moments, double confidence) {
  if (moments.count() < 30) throw std::invalid_argument("variance_ci needs at least 30 samples");
  if (!(confidence >= 0.0 && confidence < 1.0))
    throw std::invalid_argument("confidence must lie in [0, 1)");
  const double v = moments.variance();
  const double z = confidence == 0.0 ? 0.0 : normal_quantile(0.5 + confidence / 2.0);
  const double half = z * std::sqrt(2.0 / static_cast<double>(moments.count() - 1));
  return {v * (1.0 - half), v * (1.0 + half)};
}

double ks_threshold(std::int64_t n, double alpha) {
  if (n < 1) throw std::invalid_argument("ks_threshold needs n >= 1");
  double c = 0.0;
  if (alpha == 0.01)
    c = 1.628;
  else if (alpha == 0.05)
    c = 1.358;
  else if (alpha > 0.0 && alpha < 1.0)
    c = std::sqrt(-std::log(alpha / 2.0) / 2.0);
  else
    throw std::invalid_argument("alpha must lie in (0, 1)");
  return c / std::sqrt(static_cast<double>(n));
}

KsResult ks_statistic(std::span<const double> sorted_sample,
                      const std::function<double(double)>& cdf, double alpha) {
  if (sorted_sample.size() < 10) throw std::invalid_argument("KS test needs at least 10 samples");
  if (!std::is_sorted(sorted_sample.begin(), sorted_sample.end()))
    throw std::invalid_argument("KS sample must be sorted");
  const auto n = static_cast<double>(sorted_sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted_sample.size(); ++i) {
    const double f = cdf(sorted_sample[i]);
    const auto rank = static_cast<double>(i + 1);
    d = std::max({d, rank / n - f, f - (rank - 1.0) / n});
  }
  KsResult out;
  out.statistic = d;
  out.sample_size = static_cast<std::int64_t>(sorted_sample.size());
  out.alpha = alpha;
  out.threshold = ks_threshold(out.sample_size, alpha);
  return out;
}

PowerLawFit fit_power_law(std::span<const std::pair<double, double>> points, double n_lo,
                          double n_hi) {
  std::vector<std::pair<double, double>> logs;
  for (const auto& [n, y] : points) {
    if (n < n_lo || n > n_hi) continue;
    if (!(y > 0.0) || !(n > 0.0)) throw std::domain_error("power-law fit needs positive n and y");
    logs.emplace_back(std::log(n), std::log(y));
  }
  if (logs.size() < 3) throw std::invalid_argument("power-law fit needs at least 3 points");
  const auto count = static_cast<double>(logs.size());
  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : logs) {
    mx += x;
    my += y;
  }
  mx /= count;
  my /= count;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : logs) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("power-law fit needs distinct n values");
  PowerLawFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  for (const auto& [x, y] : logs) {
    const double r = y - (fit.intercept + fit.slope * x);
    fit.rss += r * r;
  }
  fit.n_lo = n_lo;
  fit.n_hi = n_hi;
  fit.points = static_cast<std::int64_t>(logs.size());
  return fit;
}

RunningSup::RunningSup(std::function<double(std::int64_t)> normalizer, std::int64_t n_min)
    : normalizer_(std::move(normalizer)), n_min_(n_min) {
  normalizer_(n_min_);  // surfaces domain errors up front
}

void RunningSup::observe(std::int64_t n, double diff) {
  if (n < n_min_) return;
  const double r = diff / normalizer_(n);
  plus_ = std::max(plus_, r);
  minus_ = std::max(minus_, -r);
}

std::pair<double, double> running_sup(std::span<const std::pair<std::int64_t, double>> series,
                                      const std::function<double(std::int64_t)>& normalizer,
                                      std::int64_t n_min) {
  RunningSup sup(normalizer, n_min);
  for (const auto& [n, diff] : series) sup.observe(n, diff);
  return {sup.sup_plus(), sup.sup_minus()};
}

double empirical_quantile(std::span<const double> sample, double q) {
  if (sample.empty()) throw std::invalid_argument("quantile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile level must lie in [0, 1]");
  std::vector<double> sorted(sample.begin(), sample.end());
  const auto n = sorted.size();
  auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n)));
  rank = std::clamp<std::size_t>(rank, 1, n);
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(rank - 1),
                   sorted.end());
  return sorted[rank - 1];
}

}  // namespace erwlab
