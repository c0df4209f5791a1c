#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "erwlab/regime.hpp"
#include "erwlab/rng.hpp"

namespace erwlab {

/// Law of the walk: memory parameter p in (0, 1) and first-step
/// up-probability s in [0, 1].
class WalkParams {
public:
  explicit WalkParams(double p, double s = 0.5);

  /// Builds the parameters from decimal text so that the regime is decided on
  /// the exact decimal value rather than on its binary rounding.
  static WalkParams from_decimal(std::string_view p_decimal, double s = 0.5);

  double p() const noexcept { return p_; }
  double s() const noexcept { return s_; }
  Regime regime() const noexcept { return regime_; }
  /// (2p - 1) / 2, the slope of the conditional up-probability in S_n / n.
  double half_drift() const noexcept { return half_drift_; }

private:
  WalkParams(double p, double s, Regime regime);

  double p_;
  double s_;
  Regime regime_;
  double half_drift_;
};

/// Sufficient statistic (n, S_n).
struct WalkState {
  std::int64_t n = 0;
  std::int64_t position = 0;

  bool valid() const noexcept;
  friend bool operator==(const WalkState&, const WalkState&) = default;
};

/// Full step record X_1..X_n, used by the history-sampling stepper.
class HistoryWalkState {
public:
  HistoryWalkState() = default;
  explicit HistoryWalkState(std::vector<std::int8_t> steps);

  std::int64_t n() const noexcept { return static_cast<std::int64_t>(steps_.size()); }
  std::int64_t position() const noexcept { return position_; }
  std::span<const std::int8_t> steps() const noexcept { return steps_; }
  WalkState state() const noexcept { return {n(), position_}; }

  void push(std::int8_t step);

private:
  std::vector<std::int8_t> steps_;
  std::int64_t position_ = 0;
};

/// P(X_{n+1} = +1 | past): s at n = 0, else 1/2 + (2p-1) S_n / (2n).
double conditional_up_probability(const WalkParams& params, const WalkState& state);

/// One step driven only by (n, S_n).
inline WalkState step(const WalkParams& params, const WalkState& state, RngStream& rng) {
  const double up = state.n == 0
                        ? params.s()
                        : 0.5 + params.half_drift() * static_cast<double>(state.position) /
                                    static_cast<double>(state.n);
  return {state.n + 1, state.position + (rng.uniform() < up ? 1 : -1)};
}

/// One step by the literal rule: pick U uniform on {1..n}, copy X_U with
/// probability p, otherwise negate it. An empty history takes the s-rule.
void step_naive(const WalkParams& params, HistoryWalkState& state, RngStream& rng);

/// Positions at each checkpoint of one path. Checkpoints must be sorted and
/// lie in [1, horizon].
std::vector<WalkState> simulate_path(const WalkParams& params, std::int64_t horizon,
                                     std::span<const std::int64_t> checkpoints,
                                     RngStream& rng);

/// Outcome of two independent walks run to a common horizon.
struct PairRecord {
  std::int64_t meeting_count = 0;
  std::int64_t last_meeting = 0;  ///< 0 when the walks never met
  std::int64_t final_diff = 0;    ///< S_N - S'_N
  std::vector<std::int64_t> checkpoint_diffs;
  /// diff / diff_normalizer(regime of p, n); NaN below the normalizer domain.
  std::vector<double> normalized_diffs;
  // Running suprema over n >= n_min of +diff/norm and -diff/norm, with
  // norm = sqrt(n log log n) (i) and sqrt(n log n log log log n) (ii).
  // -infinity when no n >= n_min was visited.
  double sup_plus_i = -std::numeric_limits<double>::infinity();
  double sup_minus_i = -std::numeric_limits<double>::infinity();
  double sup_plus_ii = -std::numeric_limits<double>::infinity();
  double sup_minus_ii = -std::numeric_limits<double>::infinity();
};

/// Runs two independent walks to `horizon`. A meeting is S_n = S'_n for some
/// 1 <= n <= horizon; the common start at n = 0 is not counted.
/// n_min is the first step of the sup statistics (>= 16).
PairRecord simulate_pair(const WalkParams& params, std::int64_t horizon,
                         std::span<const std::int64_t> checkpoints, RngStream& rng_a,
                         RngStream& rng_b, std::int64_t n_min = 100);

/// Throws std::invalid_argument unless checkpoints are sorted within
/// [1, horizon].
void validate_checkpoints(std::int64_t horizon, std::span<const std::int64_t> checkpoints);

}  // namespace erwlab
