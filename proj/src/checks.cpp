#include "erwlab/checks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "erwlab/ensemble.hpp"
#include "erwlab/oracle.hpp"
#include "erwlab/regime.hpp"
#include "erwlab/stats.hpp"
#include "erwlab/walk.hpp"

namespace erwlab {

namespace {

using Clock = std::chrono::steady_clock;

const std::vector<double> kOracleP = {0.1, 0.5, 0.6, 0.75, 0.9};
const std::vector<double> kOracleS = {0.5, 1.0};

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Collects lines for one criterion and stamps their elapsed time.
class Recorder {
public:
  Recorder(int criterion, std::string suite)
      : criterion_(criterion), suite_(std::move(suite)), start_(Clock::now()) {}

  void add(std::string name, double measured, double target, std::string condition, bool passed,
           bool informational = false) {
    CheckResult r;
    r.criterion = criterion_;
    r.suite = suite_;
    r.name = std::move(name);
    r.measured = measured;
    r.target = target;
    r.condition = std::move(condition);
    r.passed = informational || passed;
    r.informational = informational;
    r.seconds = seconds_since(start_);
    start_ = Clock::now();
    lines_.push_back(std::move(r));
  }

  // Fails when the requested replica count is below the criterion's minimum.
  bool guard(std::int64_t requested, std::int64_t required) {
    if (requested >= required) return true;
    add("precision guard: replicas", static_cast<double>(requested),
        static_cast<double>(required), ">= " + fmt(static_cast<double>(required)), false);
    return false;
  }

  std::vector<CheckResult> take() { return std::move(lines_); }

private:
  int criterion_;
  std::string suite_;
  Clock::time_point start_;
  std::vector<CheckResult> lines_;
};

std::int64_t replicas_for(const CheckOptions& options, std::int64_t required) {
  return options.replicas > 0 ? options.replicas : required;
}

EnsembleConfig make_config(const CheckOptions& options, std::int64_t replicas,
                           std::int64_t horizon) {
  EnsembleConfig cfg;
  cfg.replicas = replicas;
  cfg.horizon = horizon;
  cfg.checkpoints = {horizon};
  cfg.master_seed = options.seed;
  cfg.workers = options.workers;
  return cfg;
}

std::string param_tag(double p, double s) { return "p=" + fmt(p) + " s=" + fmt(s); }

// --- criterion 1: oracle self-consistency -----------------------------------

std::vector<CheckResult> oracle_consistency() {
  Recorder rec(1, "oracle");
  constexpr std::int64_t kMaxN = 500;
  double worst_moment = 0.0;
  double worst_norm = 0.0;
  bool parity_ok = true;
  for (const double p : kOracleP) {
    for (const double s : kOracleS) {
      const WalkParams params(p, s);
      const auto series = moment_series(params, kMaxN);
      for (std::int64_t n = 1; n <= kMaxN; ++n) {
        const LatticePmf pmf = exact_pmf(params, n);
        const auto i = static_cast<std::size_t>(n);
        const double mean_ref = series.means[i];
        const double m2_ref = series.second_moments[i];
        worst_moment = std::max(worst_moment, std::abs(pmf.mean() - mean_ref) /
                                                  std::max(1.0, std::abs(mean_ref)));
        worst_moment = std::max(worst_moment, std::abs(pmf.second_moment() - m2_ref) /
                                                  std::max(1.0, std::abs(m2_ref)));
        worst_norm = std::max(worst_norm, std::abs(pmf.total() - 1.0));
        parity_ok = parity_ok && pmf.lo() == -n && pmf.hi() == n;
      }
    }
  }
  rec.add("recursion vs pmf moments, max rel err (n<=500)", worst_moment, 0.0, "<= 1e-9",
          worst_moment <= 1e-9);
  rec.add("pmf total mass, max |sum-1|", worst_norm, 0.0, "<= 1e-10", worst_norm <= 1e-10);
  rec.add("pmf support {-n,...,n} step 2", parity_ok ? 1.0 : 0.0, 1.0, "== 1", parity_ok);
  return rec.take();
}

// --- criterion 2: sampler equivalence ---------------------------------------

// Law of S_n under the literal history sampler, by enumerating every recalled
// index U_k and every keep/negate decision. Histories are keyed by their step
// sequence, so identical prefixes are merged.
std::map<std::int64_t, double> enumerate_history_sampler(double p, double s, int n) {
  std::map<std::vector<std::int8_t>, double> layer{{{1}, s}, {{-1}, 1.0 - s}};
  for (int k = 1; k < n; ++k) {
    std::map<std::vector<std::int8_t>, double> next;
    for (const auto& [history, prob] : layer) {
      if (prob == 0.0) continue;
      const double pick = prob / static_cast<double>(k);
      for (int u = 0; u < k; ++u) {
        auto keep = history;
        keep.push_back(history[static_cast<std::size_t>(u)]);
        next[keep] += pick * p;
        auto flip = history;
        flip.push_back(static_cast<std::int8_t>(-history[static_cast<std::size_t>(u)]));
        next[flip] += pick * (1.0 - p);
      }
    }
    layer = std::move(next);
  }
  std::map<std::int64_t, double> law;
  for (const auto& [history, prob] : layer) {
    std::int64_t pos = 0;
    for (const auto x : history) pos += x;
    law[pos] += prob;
  }
  return law;
}

// Law of S_n induced by conditional_up_probability on (n, S_n).
std::map<std::int64_t, double> sufficient_statistic_law(const WalkParams& params, int n) {
  std::map<std::int64_t, double> law{{0, 1.0}};
  for (int k = 0; k < n; ++k) {
    std::map<std::int64_t, double> next;
    for (const auto& [pos, prob] : law) {
      const double up = conditional_up_probability(params, {k, pos});
      next[pos + 1] += prob * up;
      next[pos - 1] += prob * (1.0 - up);
    }
    law = std::move(next);
  }
  return law;
}

double max_abs_gap(const std::map<std::int64_t, double>& a, const std::map<std::int64_t, double>& b) {
  double gap = 0.0;
  for (const auto& [k, v] : a) {
    const auto it = b.find(k);
    gap = std::max(gap, std::abs(v - (it == b.end() ? 0.0 : it->second)));
  }
  for (const auto& [k, v] : b)
    if (!a.contains(k)) gap = std::max(gap, std::abs(v));
  return gap;
}

std::vector<CheckResult> sampler_equivalence() {
  Recorder rec(2, "oracle");
  double worst_sampler = 0.0;
  double worst_dp = 0.0;
  for (const double p : kOracleP) {
    for (const double s : kOracleS) {
      const WalkParams params(p, s);
      for (int n = 1; n <= 8; ++n) {
        const auto literal = enumerate_history_sampler(p, s, n);
        const auto stepper = sufficient_statistic_law(params, n);
        worst_sampler = std::max(worst_sampler, max_abs_gap(literal, stepper));
        std::map<std::int64_t, double> dp;
        const LatticePmf pmf = exact_pmf(params, n);
        for (std::int64_t k = pmf.lo(); k <= pmf.hi(); k += 2) dp[k] = pmf.at(k);
        worst_dp = std::max(worst_dp, max_abs_gap(literal, dp));
      }
    }
  }
  rec.add("history sampler vs O(1) stepper pmf, max |diff| (n<=8)", worst_sampler, 0.0,
          "<= 1e-12", worst_sampler <= 1e-12);
  rec.add("history sampler vs exact_pmf, max |diff| (n<=8)", worst_dp, 0.0, "<= 1e-12",
          worst_dp <= 1e-12);
  return rec.take();
}

// --- criterion 3: diffusive CLT ---------------------------------------------

std::vector<CheckResult> diffusive_clt(const CheckOptions& options) {
  Recorder rec(3, "clt");
  constexpr std::int64_t kRequired = 10000;
  constexpr std::int64_t kHorizon = 100000;
  const std::int64_t replicas = replicas_for(options, kRequired);
  if (!rec.guard(replicas, kRequired)) return rec.take();
  for (const double p : {0.5, 0.6}) {
    const WalkParams params(p);
    const auto result = run_walk_ensemble(params, make_config(options, replicas, kHorizon));
    const double target = 1.0 / (3.0 - 4.0 * p);
    const double var = result.checkpoints.back().normalized.variance();
    const double rel = std::abs(var / target - 1.0);
    rec.add("Var(S_N/sqrt N) " + param_tag(p, 0.5), var, target, "|rel err| <= 0.05",
            rel <= 0.05);
    std::vector<double> z;
    z.reserve(result.final_positions.size());
    const double scale = std::sqrt(static_cast<double>(kHorizon) * target);
    for (const auto x : result.final_positions) z.push_back(static_cast<double>(x) / scale);
    std::sort(z.begin(), z.end());
    const KsResult ks = ks_statistic(z, normal_cdf, 0.01);
    rec.add("KS of S_N/sqrt(N/(3-4p)) vs N(0,1) " + param_tag(p, 0.5), ks.statistic,
            ks.threshold, "<= " + fmt(ks.threshold) + " (not rejected at 1%)", !ks.reject());
  }
  return rec.take();
}

// --- criterion 4: marginal regime -------------------------------------------

std::vector<CheckResult> marginal_scaling(const CheckOptions& options) {
  Recorder rec(4, "scaling");
  constexpr std::int64_t kRequired = 5000;
  constexpr std::int64_t kHorizon = 100000;
  const WalkParams params = WalkParams::from_decimal("0.75");
  double harmonic = 0.0;
  for (std::int64_t k = 1; k <= kHorizon; ++k) harmonic += 1.0 / static_cast<double>(k);
  const double exact = exact_second_moment(params, kHorizon);
  const double closed = static_cast<double>(kHorizon) * harmonic;
  rec.add("oracle E[S_N^2] vs N*H_N, rel err", std::abs(exact / closed - 1.0), 0.0, "<= 1e-9",
          std::abs(exact / closed - 1.0) <= 1e-9);

  const std::int64_t replicas = replicas_for(options, kRequired);
  if (!rec.guard(replicas, kRequired)) return rec.take();
  const auto result = run_walk_ensemble(params, make_config(options, replicas, kHorizon));
  const auto& cp = result.checkpoints.back();
  const double se = cp.squared.standard_error();
  const double z = std::abs(cp.squared.mean() - exact) / se;
  rec.add("MC E[S_N^2] vs N*H_N, |z| (standard errors)", z, 0.0, "<= 4", z <= 4.0);
  rec.add("MC E[S_N^2]", cp.squared.mean(), exact, "reference", true, true);
  const double target = harmonic / std::log(static_cast<double>(kHorizon));
  const double var = cp.normalized.variance();
  rec.add("Var(S_N/sqrt(N log N))", var, target, "|rel err| <= 0.10",
          std::abs(var / target - 1.0) <= 0.10);
  return rec.take();
}

// --- criterion 5: superdiffusive scaling ------------------------------------

std::vector<CheckResult> superdiffusive_scaling(const CheckOptions& options) {
  Recorder rec(5, "scaling");
  constexpr double kP = 0.85;
  constexpr std::int64_t kRequired = 2000;
  constexpr std::int64_t kHorizon = 100000;
  const WalkParams params(kP);
  const auto series = moment_series(params, 10000);
  std::vector<std::pair<double, double>> points;
  for (std::int64_t n = 1000; n <= 10000; ++n)
    points.emplace_back(static_cast<double>(n),
                        series.second_moments[static_cast<std::size_t>(n)] / static_cast<double>(n));
  const PowerLawFit fit = fit_power_law(points, 1000.0, 10000.0);
  rec.add("log-log slope of E[S_n^2]/n on [1e3,1e4]", fit.slope, 4.0 * kP - 3.0,
          "|diff| <= 0.05", std::abs(fit.slope - (4.0 * kP - 3.0)) <= 0.05);

  const std::int64_t replicas = replicas_for(options, kRequired);
  if (!rec.guard(replicas, kRequired)) return rec.take();
  const auto samples = estimate_limit_samples(params, make_config(options, replicas, kHorizon));
  const double target = 2.0 * exact_second_moment(params, kHorizon) /
                        std::pow(static_cast<double>(kHorizon), 4.0 * kP - 2.0);
  const double var = samples.moments.variance();
  rec.add("Var(M_hat) vs 2 E[S_N^2]/N^(4p-2)", var, target, "|rel err| <= 0.10",
          std::abs(var / target - 1.0) <= 0.10);
  return rec.take();
}

// --- criterion 6: meeting dichotomy -----------------------------------------

std::vector<CheckResult> meeting_dichotomy(const CheckOptions& options) {
  Recorder rec(6, "meeting");
  const WalkParams diffusive(0.5);
  const WalkParams superdiffusive(0.85);
  auto ratio = [](const WalkParams& params) {
    const auto q = meeting_probability_series(params, 4000);
    double half = 0.0, full = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
      full += q[i];
      if (i < 2000) half += q[i];
    }
    return full / half;
  };
  const double r_diff = ratio(diffusive);
  const double r_super = ratio(superdiffusive);
  rec.add("oracle E[meetings to 4000]/E[meetings to 2000] p=0.5", r_diff, 1.3, ">= 1.3",
          r_diff >= 1.3);
  rec.add("oracle E[meetings to 4000]/E[meetings to 2000] p=0.85", r_super, 1.1, "<= 1.1",
          r_super <= 1.1);

  constexpr std::int64_t kRequired = 1000;
  constexpr std::int64_t kHorizon = 100000;
  const std::int64_t replicas = replicas_for(options, kRequired);
  if (!rec.guard(replicas, kRequired)) return rec.take();

  const auto predicted = extrapolate_expected_meetings(diffusive, kHorizon);
  const auto pairs = run_pair_ensemble(diffusive, make_config(options, replicas, kHorizon));
  const double z =
      std::abs(pairs.meeting_count.mean() - predicted.total()) / pairs.meeting_count.standard_error();
  rec.add("MC mean meetings p=0.5 vs oracle+tail " + fmt(predicted.total()) + ", |z|", z, 0.0,
          "<= 4", z <= 4.0);

  const auto super_pairs =
      run_pair_ensemble(superdiffusive, make_config(options, replicas, kHorizon));
  const double after_1e3 = super_pairs.fraction_last_meeting_after(1000);
  const double after_1e4 = super_pairs.fraction_last_meeting_after(10000);
  rec.add("p=0.85 P(last>1e3) - P(last>1e4) [" + fmt(after_1e3) + " - " + fmt(after_1e4) + "]",
          after_1e3 - after_1e4, 0.05, ">= 0.05", after_1e3 - after_1e4 >= 0.05);
  return rec.take();
}

// --- criterion 7: non-degenerate limit of the difference --------------------

std::vector<CheckResult> limit_nondegeneracy(const CheckOptions& options) {
  Recorder rec(7, "limit");
  constexpr std::int64_t kRequired = 2000;
  constexpr std::int64_t kHorizon = 100000;
  const std::int64_t replicas = replicas_for(options, kRequired);
  if (!rec.guard(replicas, kRequired)) return rec.take();
  const WalkParams params(0.85);
  const auto limit = estimate_limit_samples(params, make_config(options, replicas, kHorizon));
  const double mean = limit.moments.mean();
  const double sd = limit.moments.stddev();
  std::vector<double> z(limit.samples);
  for (auto& x : z) x = (x - mean) / sd;
  std::sort(z.begin(), z.end());
  const KsResult ks = ks_statistic(z, normal_cdf, 0.01);
  rec.add("KS of M_hat vs fitted normal", ks.statistic, ks.threshold,
          "> " + fmt(ks.threshold) + " (rejected at 1%)", ks.reject());
  const double zmean = std::abs(mean) / limit.moments.standard_error();
  rec.add("|mean(M_hat)| in standard errors", zmean, 0.0, "<= 4", zmean <= 4.0);
  const double sd_se = sd / std::sqrt(2.0 * static_cast<double>(limit.moments.count() - 1));
  rec.add("sd(M_hat) / se(sd)", sd / sd_se, 10.0, "> 10", sd / sd_se > 10.0);
  return rec.take();
}

// --- criterion 8: LIL sanity ------------------------------------------------

std::vector<CheckResult> lil_sanity(const CheckOptions& options) {
  Recorder rec(8, "lil");
  constexpr std::int64_t kRequired = 100;
  constexpr std::int64_t kHorizon = 1000000;
  const std::int64_t replicas = replicas_for(options, kRequired);
  if (!rec.guard(replicas, kRequired)) return rec.take();
  for (const double p : {0.5, 0.6}) {
    const WalkParams params(p);
    const auto pairs = run_pair_ensemble(params, make_config(options, replicas, kHorizon));
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& r : pairs.records) best = std::max(best, r.sup_plus_i);
    const double scale = 1.0 / std::sqrt(3.0 - 4.0 * p);
    const double lo = 1.2 * scale;
    const double hi = 3.2 * scale;
    rec.add("max sup +diff/sqrt(n loglog n) " + param_tag(p, 0.5) + " (limsup const " +
                fmt(lil_constant(params.regime(), p)) + ")",
            best, lil_constant(params.regime(), p), "in [" + fmt(lo) + ", " + fmt(hi) + "]",
            best >= lo && best <= hi);
    std::vector<double> sups;
    for (const auto& r : pairs.records) sups.push_back(r.sup_plus_i);
    rec.add("median per-pair sup +diff/sqrt(n loglog n) " + param_tag(p, 0.5), empirical_quantile(sups, 0.5),
            lil_constant(params.regime(), p), "recorded only", true, true);
  }
  const WalkParams marginal = WalkParams::from_decimal("0.75");
  const auto pairs = run_pair_ensemble(marginal, make_config(options, replicas, kHorizon));
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& r : pairs.records) best = std::max(best, r.sup_plus_ii);
  rec.add("max sup +diff/sqrt(n log n logloglog n) p=0.75 (recorded only)", best, 2.0,
          "not asserted", true, true);
  return rec.take();
}

// --- criterion 9: determinism -----------------------------------------------

bool same_moments(const StreamingMoments& a, const StreamingMoments& b) {
  auto bits = [](double x) {
    std::uint64_t u;
    std::memcpy(&u, &x, sizeof u);
    return u;
  };
  return a.count() == b.count() && bits(a.mean()) == bits(b.mean()) &&
         bits(a.m2()) == bits(b.m2()) && bits(a.min()) == bits(b.min()) &&
         bits(a.max()) == bits(b.max());
}

bool same_walk_results(const WalkEnsembleResult& a, const WalkEnsembleResult& b) {
  if (a.final_positions != b.final_positions || a.checkpoints.size() != b.checkpoints.size())
    return false;
  for (std::size_t i = 0; i < a.checkpoints.size(); ++i) {
    const auto& x = a.checkpoints[i];
    const auto& y = b.checkpoints[i];
    if (x.n != y.n || !same_moments(x.raw, y.raw) || !same_moments(x.squared, y.squared) ||
        !same_moments(x.normalized, y.normalized))
      return false;
  }
  return true;
}

bool same_pair_results(const PairEnsembleResult& a, const PairEnsembleResult& b) {
  if (a.records.size() != b.records.size() || !same_moments(a.meeting_count, b.meeting_count))
    return false;
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    const auto& x = a.records[i];
    const auto& y = b.records[i];
    if (x.meeting_count != y.meeting_count || x.last_meeting != y.last_meeting ||
        x.final_diff != y.final_diff || x.checkpoint_diffs != y.checkpoint_diffs ||
        std::memcmp(&x.sup_plus_i, &y.sup_plus_i, sizeof(double)) != 0 ||
        std::memcmp(&x.sup_minus_ii, &y.sup_minus_ii, sizeof(double)) != 0)
      return false;
  }
  return true;
}

std::vector<CheckResult> determinism(const CheckOptions& options) {
  Recorder rec(9, "determinism");
  EnsembleConfig cfg;
  cfg.replicas = 300;
  cfg.horizon = 20000;
  cfg.checkpoints = {10, 1000, 20000};
  cfg.master_seed = options.seed;
  for (const double p : {0.6, 0.85}) {
    const WalkParams params(p);
    cfg.workers = 1;
    const auto w1 = run_walk_ensemble(params, cfg);
    const auto p1 = run_pair_ensemble(params, cfg);
    const auto again = run_walk_ensemble(params, cfg);
    cfg.workers = 4;
    const auto w4 = run_walk_ensemble(params, cfg);
    const auto p4 = run_pair_ensemble(params, cfg);
    cfg.workers = 7;
    const auto w7 = run_walk_ensemble(params, cfg);
    const bool walks = same_walk_results(w1, w4) && same_walk_results(w1, w7);
    const bool rerun = same_walk_results(w1, again);
    const bool pairs = same_pair_results(p1, p4);
    rec.add("walk ensemble bit-identical, workers 1/4/7 " + param_tag(p, 0.5), walks, 1.0,
            "== 1", walks);
    rec.add("walk ensemble bit-identical on rerun " + param_tag(p, 0.5), rerun, 1.0, "== 1",
            rerun);
    rec.add("pair ensemble bit-identical, workers 1/4 " + param_tag(p, 0.5), pairs, 1.0, "== 1",
            pairs);
  }
  return rec.take();
}

}  // namespace

std::vector<std::string_view> check_suites() {
  return {"oracle", "clt", "scaling", "meeting", "limit", "lil", "determinism", "all"};
}

std::vector<int> suite_criteria(std::string_view suite) {
  if (suite == "oracle") return {1, 2};
  if (suite == "clt") return {3};
  if (suite == "scaling") return {4, 5};
  if (suite == "meeting") return {6};
  if (suite == "limit") return {7};
  if (suite == "lil") return {8};
  if (suite == "determinism") return {9};
  if (suite == "all") return {1, 2, 3, 4, 5, 6, 7, 8, 9};
  throw std::invalid_argument("unknown check suite '" + std::string(suite) + "'");
}

std::vector<CheckResult> run_criterion(int criterion, const CheckOptions& options) {
  switch (criterion) {
    case 1: return oracle_consistency();
    case 2: return sampler_equivalence();
    case 3: return diffusive_clt(options);
    case 4: return marginal_scaling(options);
    case 5: return superdiffusive_scaling(options);
    case 6: return meeting_dichotomy(options);
    case 7: return limit_nondegeneracy(options);
    case 8: return lil_sanity(options);
    case 9: return determinism(options);
    default: break;
  }
  throw std::invalid_argument("unknown acceptance criterion " + std::to_string(criterion));
}

std::vector<CheckResult> run_check_suite(std::string_view suite, const CheckOptions& options) {
  std::vector<CheckResult> out;
  for (const int c : suite_criteria(suite)) {
    auto lines = run_criterion(c, options);
    out.insert(out.end(), std::make_move_iterator(lines.begin()),
               std::make_move_iterator(lines.end()));
  }
  return out;
}

bool all_passed(const std::vector<CheckResult>& results) noexcept {
  return std::all_of(results.begin(), results.end(),
                     [](const CheckResult& r) { return r.passed; });
}

}  // namespace erwlab
