#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <utility>
#include <vector>

namespace erwlab {

/// Mergeable single-pass moments (Welford update, Chan et al. merge).
class StreamingMoments {
public:
  void add(double x) noexcept;
  void merge(const StreamingMoments& other) noexcept;

  std::int64_t count() const noexcept { return count_; }
  double mean() const noexcept { return mean_; }
  /// Sum of squared deviations from the mean.
  double m2() const noexcept { return m2_; }
  double min() const noexcept { return min_; }
  double max() const noexcept { return max_; }

  /// Unbiased sample variance; 0 for fewer than two samples.
  double variance() const noexcept;
  double stddev() const noexcept;
  /// Standard error of the mean.
  double standard_error() const noexcept;

private:
  std::int64_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
  double min_ = std::numeric_limits<double>::infinity();
  double max_ = -std::numeric_limits<double>::infinity();
};

StreamingMoments moments_update(StreamingMoments acc, double x) noexcept;
StreamingMoments moments_merge(StreamingMoments a, const StreamingMoments& b) noexcept;

/// Merges accumulators pairwise in a fixed balanced tree over their index
/// order, so the result depends only on the inputs and never on which worker
/// finished first.
StreamingMoments tree_reduce(std::span<const StreamingMoments> leaves);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double x) const noexcept { return lo <= x && x <= hi; }
};

/// Normal-approximation interval variance * (1 +- z sqrt(2/(count-1))).
/// Assumes roughly Gaussian samples. Requires count >= 30.
Interval variance_ci(const StreamingMoments& moments, double confidence);

double normal_cdf(double x);
double normal_quantile(double q);

struct KsResult {
  double statistic = 0.0;
  std::int64_t sample_size = 0;
  double alpha = 0.01;
  double threshold = 0.0;
  bool reject() const noexcept { return statistic > threshold; }
};

/// Asymptotic one-sample critical value c(alpha)/sqrt(n); 1.628 at 1% and
/// 1.358 at 5%, sqrt(-log(alpha/2)/2) otherwise.
double ks_threshold(std::int64_t n, double alpha);

/// One-sample Kolmogorov-Smirnov distance of a sorted sample from cdf.
KsResult ks_statistic(std::span<const double> sorted_sample,
                      const std::function<double(double)>& cdf, double alpha = 0.01);

struct PowerLawFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rss = 0.0;
  double n_lo = 0.0;
  double n_hi = 0.0;
  std::int64_t points = 0;
};

/// Least squares of log y on log n over points with n in [n_lo, n_hi].
PowerLawFit fit_power_law(std::span<const std::pair<double, double>> points, double n_lo,
                          double n_hi);

/// Suprema of +diff/normalizer(n) and -diff/normalizer(n) over the stream,
/// counting only n >= n_min.
class RunningSup {
public:
  explicit RunningSup(std::function<double(std::int64_t)> normalizer, std::int64_t n_min);

  void observe(std::int64_t n, double diff);
  double sup_plus() const noexcept { return plus_; }
  double sup_minus() const noexcept { return minus_; }

private:
  std::function<double(std::int64_t)> normalizer_;
  std::int64_t n_min_;
  double plus_ = -std::numeric_limits<double>::infinity();
  double minus_ = -std::numeric_limits<double>::infinity();
};

std::pair<double, double> running_sup(std::span<const std::pair<std::int64_t, double>> series,
                                      const std::function<double(std::int64_t)>& normalizer,
                                      std::int64_t n_min);

/// Nearest-rank quantile: element ceil(q n) of the sorted sample (1-based),
/// the minimum at q = 0.
double empirical_quantile(std::span<const double> sample, double q);

}  // namespace erwlab
