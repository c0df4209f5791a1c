#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "erwlab/walk.hpp"

namespace erwlab {

/// Largest n for which the O(n^2) distribution tables are built.
struct OracleLimits {
  static constexpr std::int64_t kDefaultMaxN = 20000;
  std::int64_t max_n = kDefaultMaxN;
};

/// Probability mass function on the lattice {lo, lo + 2, ..., hi}. Sites of
/// the other parity carry zero mass and are not stored.
class LatticePmf {
public:
  LatticePmf(std::int64_t n, std::int64_t lo, std::vector<double> probs);

  std::int64_t n() const noexcept { return n_; }
  std::int64_t lo() const noexcept { return lo_; }
  std::int64_t hi() const noexcept {
    return lo_ + 2 * (static_cast<std::int64_t>(probs_.size()) - 1);
  }
  std::span<const double> probs() const noexcept { return probs_; }

  /// Mass at site k; zero outside the support or off-parity.
  double at(std::int64_t k) const noexcept;

  double total() const noexcept;
  double mean() const noexcept;
  double second_moment() const noexcept;

private:
  std::int64_t n_;
  std::int64_t lo_;
  std::vector<double> probs_;
};

/// Exact E[S_n] and E[S_n^2] for n = 0..n_max (index 0 holds the empty walk).
struct MomentSeries {
  std::int64_t n_max = 0;
  std::vector<double> means;
  std::vector<double> second_moments;
};

/// Law of S_n by forward recursion on the conditional step probability.
LatticePmf exact_pmf(const WalkParams& params, std::int64_t n, OracleLimits limits = {});

/// mu_1 = 2s - 1, mu_{k+1} = mu_k (1 + (2p-1)/k).
double exact_mean(const WalkParams& params, std::int64_t n);

/// m_1 = 1, m_{k+1} = m_k (1 + 2(2p-1)/k) + 1.
double exact_second_moment(const WalkParams& params, std::int64_t n);

MomentSeries moment_series(const WalkParams& params, std::int64_t n_max);

/// P(S_n = S'_n) for two independent walks with the same law.
double meeting_probability(const WalkParams& params, std::int64_t n, OracleLimits limits = {});

/// P(S_k = S'_k) for k = 1..n_max in one sweep; element k-1 is step k.
std::vector<double> meeting_probability_series(const WalkParams& params, std::int64_t n_max,
                                               OracleLimits limits = {});

/// Sum of meeting probabilities over 1..n_max, i.e. the expected number of
/// meetings up to n_max.
double expected_meetings(const WalkParams& params, std::int64_t n_max, OracleLimits limits = {});

/// Law of S_n - S'_n; its mass at 0 is meeting_probability(n).
LatticePmf exact_diff_pmf(const WalkParams& params, std::int64_t n, OracleLimits limits = {});

/// Expected meetings up to a horizon that may exceed the oracle cap. Beyond the
/// cap, P(S_n = S'_n) is extended as c / sqrt(Var S_n), with c the mean of
/// q_n sqrt(Var S_n) over the window [cap/2, cap] and Var S_n from the exact
/// moment recursions.
struct MeetingExtrapolation {
  std::int64_t horizon = 0;
  std::int64_t cap = 0;
  double exact_part = 0.0;  ///< sum over 1..min(horizon, cap)
  double tail_part = 0.0;   ///< fitted sum over cap+1..horizon
  double fit_constant = 0.0;
  std::int64_t window_lo = 0;
  std::int64_t window_hi = 0;

  double total() const noexcept { return exact_part + tail_part; }
};

MeetingExtrapolation extrapolate_expected_meetings(const WalkParams& params,
                                                   std::int64_t horizon,
                                                   OracleLimits limits = {});

}  // namespace erwlab
