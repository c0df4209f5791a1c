#include "erwlab/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "erwlab/errors.hpp"

namespace erwlab {

namespace {

void check_range(std::int64_t n, const OracleLimits& limits) {
  if (n < 1 || n > limits.max_n)
    throw RangeError("oracle step count " + std::to_string(n) + " outside [1, " +
                     std::to_string(limits.max_n) + "]");
}

// Drives the forward recursion, calling visit(k, probs) for k = 1..n where
// probs[i] is P(S_k = -k + 2i).
template <class Visit>
void propagate(const WalkParams& params, std::int64_t n, Visit&& visit) {
  std::vector<double> cur{1.0 - params.s(), params.s()};
  std::vector<double> next;
  cur.reserve(static_cast<std::size_t>(n) + 1);
  next.reserve(static_cast<std::size_t>(n) + 1);
  visit(std::int64_t{1}, std::span<const double>(cur));
  const double h = params.half_drift();
  for (std::int64_t k = 1; k < n; ++k) {
    const auto kd = static_cast<double>(k);
    next.assign(static_cast<std::size_t>(k) + 2, 0.0);
    for (std::int64_t i = 0; i <= k; ++i) {
      const auto m = static_cast<double>(2 * i - k);
      // u(-m) = 0.5 - t exactly, so symmetric input stays exactly symmetric.
      const double t = h * m / kd;
      const double mass = cur[static_cast<std::size_t>(i)];
      next[static_cast<std::size_t>(i) + 1] += mass * (0.5 + t);
      next[static_cast<std::size_t>(i)] += mass * (0.5 - t);
    }
    std::swap(cur, next);
    visit(k + 1, std::span<const double>(cur));
  }
}

double sum_of_squares(std::span<const double> probs) {
  double acc = 0.0;
  for (const double x : probs) acc += x * x;
  return acc;
}

}  // namespace

LatticePmf::LatticePmf(std::int64_t n, std::int64_t lo, std::vector<double> probs)
    : n_(n), lo_(lo), probs_(std::move(probs)) {}

double LatticePmf::at(std::int64_t k) const noexcept {
  if (k < lo_ || k > hi() || ((k - lo_) & 1) != 0) return 0.0;
  return probs_[static_cast<std::size_t>((k - lo_) / 2)];
}

double LatticePmf::total() const noexcept {
  return std::accumulate(probs_.begin(), probs_.end(), 0.0);
}

double LatticePmf::mean() const noexcept {
  double acc = 0.0;
  for (std::size_t i = 0; i < probs_.size(); ++i)
    acc += probs_[i] * static_cast<double>(lo_ + 2 * static_cast<std::int64_t>(i));
  return acc;
}

double LatticePmf::second_moment() const noexcept {
  double acc = 0.0;
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    const auto k = static_cast<double>(lo_ + 2 * static_cast<std::int64_t>(i));
    acc += probs_[i] * k * k;
  }
  return acc;
}

LatticePmf exact_pmf(const WalkParams& params, std::int64_t n, OracleLimits limits) {
  check_range(n, limits);
  std::vector<double> out;
  propagate(params, n, [&](std::int64_t k, std::span<const double> probs) {
    if (k == n) out.assign(probs.begin(), probs.end());
  });
  return LatticePmf(n, -n, std::move(out));
}

MomentSeries moment_series(const WalkParams& params, std::int64_t n_max) {
  if (n_max < 1) throw RangeError("moment series needs n_max >= 1");
  MomentSeries out;
  out.n_max = n_max;
  out.means.resize(static_cast<std::size_t>(n_max) + 1);
  out.second_moments.resize(static_cast<std::size_t>(n_max) + 1);
  out.means[0] = 0.0;
  out.second_moments[0] = 0.0;
  out.means[1] = 2.0 * params.s() - 1.0;
  out.second_moments[1] = 1.0;
  const double drift = 2.0 * params.p() - 1.0;
  for (std::int64_t k = 1; k < n_max; ++k) {
    const auto kd = static_cast<double>(k);
    const auto i = static_cast<std::size_t>(k);
    out.means[i + 1] = out.means[i] * (1.0 + drift / kd);
    out.second_moments[i + 1] = out.second_moments[i] * (1.0 + 2.0 * drift / kd) + 1.0;
  }
  return out;
}

double exact_mean(const WalkParams& params, std::int64_t n) {
  if (n < 1) throw RangeError("exact_mean needs n >= 1");
  const double drift = 2.0 * params.p() - 1.0;
  double mu = 2.0 * params.s() - 1.0;
  for (std::int64_t k = 1; k < n; ++k) mu *= 1.0 + drift / static_cast<double>(k);
  return mu;
}

double exact_second_moment(const WalkParams& params, std::int64_t n) {
  if (n < 1) throw RangeError("exact_second_moment needs n >= 1");
  const double drift = 2.0 * params.p() - 1.0;
  double m = 1.0;
  for (std::int64_t k = 1; k < n; ++k) m = m * (1.0 + 2.0 * drift / static_cast<double>(k)) + 1.0;
  return m;
}

std::vector<double> meeting_probability_series(const WalkParams& params, std::int64_t n_max,
                                               OracleLimits limits) {
  check_range(n_max, limits);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n_max));
  propagate(params, n_max, [&](std::int64_t, std::span<const double> probs) {
    out.push_back(sum_of_squares(probs));
  });
  return out;
}

double meeting_probability(const WalkParams& params, std::int64_t n, OracleLimits limits) {
  return sum_of_squares(exact_pmf(params, n, limits).probs());
}

double expected_meetings(const WalkParams& params, std::int64_t n_max, OracleLimits limits) {
  const auto q = meeting_probability_series(params, n_max, limits);
  return std::accumulate(q.begin(), q.end(), 0.0);
}

LatticePmf exact_diff_pmf(const WalkParams& params, std::int64_t n, OracleLimits limits) {
  const LatticePmf pmf = exact_pmf(params, n, limits);
  const auto probs = pmf.probs();
  const auto width = static_cast<std::int64_t>(probs.size());  // n + 1
  // S - S' = 2(i - j); index t = i - j + n runs over 0..2n.
  std::vector<double> diff(static_cast<std::size_t>(2 * n + 1), 0.0);
  for (std::int64_t t = 0; t <= 2 * n; ++t) {
    const std::int64_t shift = t - n;  // i - j
    const std::int64_t i_lo = std::max<std::int64_t>(0, shift);
    const std::int64_t i_hi = std::min<std::int64_t>(width - 1, width - 1 + shift);
    double acc = 0.0;
    for (std::int64_t i = i_lo; i <= i_hi; ++i)
      acc += probs[static_cast<std::size_t>(i)] * probs[static_cast<std::size_t>(i - shift)];
    diff[static_cast<std::size_t>(t)] = acc;
  }
  return LatticePmf(n, -2 * n, std::move(diff));
}

MeetingExtrapolation extrapolate_expected_meetings(const WalkParams& params,
                                                   std::int64_t horizon,
                                                   OracleLimits limits) {
  if (horizon < 1) throw RangeError("horizon must be >= 1");
  MeetingExtrapolation out;
  out.horizon = horizon;
  out.cap = limits.max_n;
  const std::int64_t exact_n = std::min(horizon, limits.max_n);
  const auto q = meeting_probability_series(params, exact_n, limits);
  out.exact_part = std::accumulate(q.begin(), q.end(), 0.0);
  if (horizon <= limits.max_n) return out;

  const auto moments = moment_series(params, horizon);
  auto sd = [&](std::int64_t n) {
    const auto i = static_cast<std::size_t>(n);
    return std::sqrt(moments.second_moments[i] - moments.means[i] * moments.means[i]);
  };
  out.window_lo = std::max<std::int64_t>(1, limits.max_n / 2);
  out.window_hi = limits.max_n;
  double acc = 0.0;
  for (std::int64_t n = out.window_lo; n <= out.window_hi; ++n)
    acc += q[static_cast<std::size_t>(n - 1)] * sd(n);
  out.fit_constant = acc / static_cast<double>(out.window_hi - out.window_lo + 1);
  double tail = 0.0;
  for (std::int64_t n = limits.max_n + 1; n <= horizon; ++n) tail += out.fit_constant / sd(n);
  out.tail_part = tail;
  return out;
}

}  // namespace erwlab
