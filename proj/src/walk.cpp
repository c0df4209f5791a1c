#include "erwlab/walk.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace erwlab {

WalkParams::WalkParams(double p, double s) : WalkParams(p, s, classify_regime(p)) {}

WalkParams::WalkParams(double p, double s, Regime regime)
    : p_(p), s_(s), regime_(regime), half_drift_((2.0 * p - 1.0) / 2.0) {
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("memory parameter p must lie in (0, 1)");
  if (!(s >= 0.0 && s <= 1.0))
    throw std::invalid_argument("first-step parameter s must lie in [0, 1]");
}

WalkParams WalkParams::from_decimal(std::string_view p_decimal, double s) {
  const Regime regime = classify_regime(p_decimal);
  return WalkParams(parse_decimal(p_decimal), s, regime);
}

bool WalkState::valid() const noexcept {
  if (n < 0) return false;
  if (position > n || position < -n) return false;
  return ((n - position) & 1) == 0;
}

HistoryWalkState::HistoryWalkState(std::vector<std::int8_t> steps) : steps_(std::move(steps)) {
  for (const auto x : steps_) {
    if (x != 1 && x != -1) throw std::invalid_argument("steps must be +1 or -1");
    position_ += x;
  }
}

void HistoryWalkState::push(std::int8_t step) {
  if (step != 1 && step != -1) throw std::invalid_argument("steps must be +1 or -1");
  steps_.push_back(step);
  position_ += step;
}

double conditional_up_probability(const WalkParams& params, const WalkState& state) {
  if (!state.valid()) throw std::invalid_argument("invalid walk state");
  if (state.n == 0) return params.s();
  return 0.5 + params.half_drift() * static_cast<double>(state.position) /
                   static_cast<double>(state.n);
}

void step_naive(const WalkParams& params, HistoryWalkState& state, RngStream& rng) {
  if (state.n() == 0) {
    state.push(rng.uniform() < params.s() ? 1 : -1);
    return;
  }
  const auto recalled = state.steps()[rng.below(static_cast<std::uint64_t>(state.n()))];
  const bool keep = rng.uniform() < params.p();
  state.push(static_cast<std::int8_t>(keep ? recalled : -recalled));
}

void validate_checkpoints(std::int64_t horizon, std::span<const std::int64_t> checkpoints) {
  if (horizon < 0) throw std::invalid_argument("horizon must be non-negative");
  if (!std::is_sorted(checkpoints.begin(), checkpoints.end()))
    throw std::invalid_argument("checkpoints must be sorted");
  if (!checkpoints.empty() && (checkpoints.front() < 1 || checkpoints.back() > horizon))
    throw std::invalid_argument("checkpoints must lie in [1, horizon]");
}

std::vector<WalkState> simulate_path(const WalkParams& params, std::int64_t horizon,
                                     std::span<const std::int64_t> checkpoints,
                                     RngStream& rng) {
  validate_checkpoints(horizon, checkpoints);
  std::vector<WalkState> out;
  out.reserve(checkpoints.size());
  if (checkpoints.empty()) return out;
  WalkState state;
  for (const auto target : checkpoints) {
    while (state.n < target) state = step(params, state, rng);
    out.push_back(state);
  }
  return out;
}

namespace {

// Running suprema of +-diff / sqrt(n * factor(n)) where factor is increasing.
// The exact ratio is only evaluated when a cached lower bound on factor(n)
// cannot rule out a new supremum, which keeps the per-step cost to a few
// integer operations in long runs.
template <class Factor>
class SupTracker {
public:
  explicit SupTracker(Factor factor) : factor_(factor) {}

  void observe(std::int64_t n, std::int64_t diff, double& sup_plus, double& sup_minus) {
    const double x = static_cast<double>(n);
    if (n >= 2 * ref_n_) {
      ref_n_ = n;
      ref_factor_ = factor_(x);
    }
    const double d = static_cast<double>(diff);
    if (sup_plus >= 0.0 && sup_minus >= 0.0) {
      if (diff == 0) return;
      // d / sqrt(x f(x)) <= best whenever d^2 <= best^2 x f_ref, as f_ref <= f(x).
      const double best = diff > 0 ? sup_plus : sup_minus;
      if (d * d < best * best * x * ref_factor_ * (1.0 - 1e-12)) return;
    }
    const double f = factor_(x);
    ref_n_ = n;
    ref_factor_ = f;
    const double ratio = d / std::sqrt(x * f);
    sup_plus = std::max(sup_plus, ratio);
    sup_minus = std::max(sup_minus, -ratio);
  }

private:
  Factor factor_;
  std::int64_t ref_n_ = 0;
  double ref_factor_ = 0.0;
};

}  // namespace

PairRecord simulate_pair(const WalkParams& params, std::int64_t horizon,
                         std::span<const std::int64_t> checkpoints, RngStream& rng_a,
                         RngStream& rng_b, std::int64_t n_min) {
  validate_checkpoints(horizon, checkpoints);
  if (n_min < 16) throw std::invalid_argument("sup statistics start at n >= 16");

  PairRecord rec;
  rec.checkpoint_diffs.reserve(checkpoints.size());
  rec.normalized_diffs.reserve(checkpoints.size());

  auto lil_i = SupTracker([](double x) { return std::log(std::log(x)); });
  auto lil_ii = SupTracker([](double x) {
    const double l = std::log(x);
    return l * std::log(std::log(l));
  });

  const Regime regime = params.regime();
  const std::int64_t norm_min = diff_normalizer_min_n(regime);
  WalkState a;
  WalkState b;
  auto next_cp = checkpoints.begin();
  for (std::int64_t n = 1; n <= horizon; ++n) {
    a = step(params, a, rng_a);
    b = step(params, b, rng_b);
    const std::int64_t diff = a.position - b.position;
    if (diff == 0) {
      ++rec.meeting_count;
      rec.last_meeting = n;
    }
    if (n >= n_min) {
      lil_i.observe(n, diff, rec.sup_plus_i, rec.sup_minus_i);
      lil_ii.observe(n, diff, rec.sup_plus_ii, rec.sup_minus_ii);
    }
    while (next_cp != checkpoints.end() && *next_cp == n) {
      rec.checkpoint_diffs.push_back(diff);
      rec.normalized_diffs.push_back(
          n >= norm_min ? static_cast<double>(diff) / diff_normalizer(regime, params.p(), n)
                        : std::numeric_limits<double>::quiet_NaN());
      ++next_cp;
    }
  }
  rec.final_diff = a.position - b.position;
  return rec;
}

}  // namespace erwlab
