// erwlab command-line driver. Talks to the library exclusively through the C
// API in erwlab/erwlab.h.
//
// Exit codes: 0 success, 1 usage error, 2 numerical, budget or acceptance
// failure.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "erwlab/erwlab.h"
#include "output.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace erwlab::cli {
namespace {

constexpr int kExitUsage = 1;
constexpr int kExitFailure = 2;

struct ExitError {
  int code;
  std::string message;
};

[[noreturn]] void usage_error(const std::string& message) { throw ExitError{kExitUsage, message}; }

void require_ok(erwlab_status status) {
  if (status == ERWLAB_OK) return;
  const int code = status == ERWLAB_ERR_INVALID_ARGUMENT ? kExitUsage : kExitFailure;
  throw ExitError{code, std::string(erwlab_status_string(status)) + ": " + erwlab_last_error()};
}

// RAII owners for the C handles.
template <class T, void (*Destroy)(T*)>
struct HandleDeleter {
  void operator()(T* p) const noexcept { Destroy(p); }
};
using Params = std::unique_ptr<erwlab_params, HandleDeleter<erwlab_params, erwlab_params_destroy>>;
using Pmf = std::unique_ptr<erwlab_pmf, HandleDeleter<erwlab_pmf, erwlab_pmf_destroy>>;
using WalkResult =
    std::unique_ptr<erwlab_walk_result, HandleDeleter<erwlab_walk_result, erwlab_walk_result_destroy>>;
using PairResult =
    std::unique_ptr<erwlab_pair_result, HandleDeleter<erwlab_pair_result, erwlab_pair_result_destroy>>;
using CheckReport = std::unique_ptr<erwlab_check_report,
                                    HandleDeleter<erwlab_check_report, erwlab_check_report_destroy>>;

/// Everything needed to re-run a command; serialized into the manifest.
struct RunConfig {
  std::string command;
  std::string p;
  double s = 0.5;
  std::int64_t n = 0;
  std::string what = "pmf";
  std::int64_t max_n = 0;
  std::int64_t horizon = 0;
  std::int64_t replicas = 0;
  std::vector<std::int64_t> checkpoints;
  std::uint64_t seed = 0;
  int workers = 1;
  std::string format = "csv";
  std::int64_t n_min_lil = 100;
  double budget = 1e10;
  std::string suite = "all";
};

json to_json(const RunConfig& c) {
  json j = {{"command", c.command}, {"p", c.p}, {"s", c.s}, {"seed", c.seed},
            {"workers", c.workers}, {"format", c.format}};
  if (c.command == "oracle") {
    j["n"] = c.n;
    j["what"] = c.what;
    j["max_n"] = c.max_n;
  } else {
    j["horizon"] = c.horizon;
    j["replicas"] = c.replicas;
    j["checkpoints"] = c.checkpoints;
    j["n_min_lil"] = c.n_min_lil;
    j["step_budget"] = c.budget;
    if (c.command == "pair") j["max_n"] = c.max_n;
  }
  return j;
}

RunConfig from_json(const json& j) {
  RunConfig c;
  c.command = j.at("command").get<std::string>();
  c.p = j.at("p").get<std::string>();
  c.s = j.at("s").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.workers = j.at("workers").get<int>();
  c.format = j.at("format").get<std::string>();
  c.n = j.value("n", std::int64_t{0});
  c.what = j.value("what", std::string("pmf"));
  c.max_n = j.value("max_n", std::int64_t{0});
  c.horizon = j.value("horizon", std::int64_t{0});
  c.replicas = j.value("replicas", std::int64_t{0});
  c.checkpoints = j.value("checkpoints", std::vector<std::int64_t>{});
  c.n_min_lil = j.value("n_min_lil", std::int64_t{100});
  c.budget = j.value("step_budget", 1e10);
  return c;
}

struct CommandOutput {
  std::vector<std::pair<std::string, Table>> tables;  // base name -> table
  std::vector<std::string> summary;
  json extra = json::object();
};

Params make_params(const RunConfig& c) {
  erwlab_params* raw = nullptr;
  require_ok(erwlab_params_create(c.p.c_str(), c.s, &raw));
  return Params(raw);
}

erwlab_ensemble_config make_config(const RunConfig& c) {
  erwlab_ensemble_config cfg;
  erwlab_ensemble_config_init(&cfg);
  cfg.replicas = c.replicas;
  cfg.horizon = c.horizon;
  cfg.checkpoints = c.checkpoints.empty() ? nullptr : c.checkpoints.data();
  cfg.checkpoint_count = c.checkpoints.size();
  cfg.master_seed = c.seed;
  cfg.workers = c.workers;
  cfg.n_min_lil = c.n_min_lil;
  cfg.step_budget = c.budget;
  return cfg;
}

// ---- oracle ----------------------------------------------------------------

CommandOutput run_oracle(const RunConfig& c) {
  const Params params = make_params(c);
  CommandOutput out;
  if (c.what == "pmf" || c.what == "diff") {
    erwlab_pmf* raw = nullptr;
    if (c.what == "pmf")
      require_ok(erwlab_oracle_pmf(params.get(), c.n, c.max_n, &raw));
    else
      require_ok(erwlab_oracle_diff_pmf(params.get(), c.n, c.max_n, &raw));
    const Pmf pmf(raw);
    Table table({"n", c.what == "pmf" ? "k" : "d", "prob"});
    const double* probs = erwlab_pmf_probs(pmf.get());
    double total = 0.0;
    for (std::size_t i = 0; i < erwlab_pmf_size(pmf.get()); ++i) {
      const std::int64_t k = erwlab_pmf_lo(pmf.get()) + 2 * static_cast<std::int64_t>(i);
      table.add({c.n, k, probs[i]});
      total += probs[i];
    }
    out.summary.push_back(c.what + " n=" + std::to_string(c.n) + " sites=" +
                          std::to_string(table.rows()) + " total=" + format_double(total));
    out.tables.emplace_back(c.what == "pmf" ? "pmf" : "diff_pmf", std::move(table));
  } else if (c.what == "moments") {
    if (c.n < 1) usage_error("--n must be >= 1");
    std::vector<double> means(static_cast<std::size_t>(c.n) + 1);
    std::vector<double> second(static_cast<std::size_t>(c.n) + 1);
    require_ok(erwlab_oracle_moments(params.get(), c.n, means.data(), second.data()));
    Table table({"n", "mean", "second_moment"});
    for (std::int64_t k = 1; k <= c.n; ++k)
      table.add({k, means[static_cast<std::size_t>(k)], second[static_cast<std::size_t>(k)]});
    out.summary.push_back("E[S_n]=" + format_double(means.back()) +
                          " E[S_n^2]=" + format_double(second.back()) + " at n=" + std::to_string(c.n));
    out.tables.emplace_back("moments", std::move(table));
  } else if (c.what == "meet") {
    if (c.n < 1) usage_error("--n must be >= 1");
    std::vector<double> q(static_cast<std::size_t>(c.n));
    require_ok(erwlab_oracle_meeting_series(params.get(), c.n, c.max_n, q.data()));
    Table table({"n", "meeting_probability", "expected_meetings"});
    double acc = 0.0;
    for (std::int64_t k = 1; k <= c.n; ++k) {
      acc += q[static_cast<std::size_t>(k - 1)];
      table.add({k, q[static_cast<std::size_t>(k - 1)], acc});
    }
    out.summary.push_back("meeting_probability=" + format_double(q.back()) +
                          " expected_meetings=" + format_double(acc) + " at n=" + std::to_string(c.n));
    out.tables.emplace_back("meetings", std::move(table));
  } else {
    usage_error("--what must be one of pmf, diff, moments, meet");
  }
  return out;
}

// ---- ensemble --------------------------------------------------------------

CommandOutput run_ensemble(const RunConfig& c) {
  const Params params = make_params(c);
  const erwlab_ensemble_config cfg = make_config(c);
  erwlab_walk_result* raw = nullptr;
  require_ok(erwlab_walk_ensemble_run(params.get(), &cfg, &raw));
  const WalkResult result(raw);

  const std::size_t count = erwlab_walk_result_checkpoint_count(result.get());
  std::int64_t last_n = 0;
  for (std::size_t i = 0; i < count; ++i) {
    std::int64_t n = 0;
    erwlab_walk_result_checkpoint(result.get(), i, &n, nullptr, nullptr, nullptr, nullptr);
    last_n = std::max(last_n, n);
  }
  std::vector<double> second(static_cast<std::size_t>(last_n) + 1);
  require_ok(erwlab_oracle_moments(params.get(), last_n, nullptr, second.data()));

  Table table({"n", "replicas", "normalizer", "raw_mean", "raw_variance", "raw_min", "raw_max",
               "second_moment", "second_moment_se", "oracle_second_moment", "normalized_mean",
               "normalized_variance"});
  CommandOutput out;
  for (std::size_t i = 0; i < count; ++i) {
    std::int64_t n = 0;
    double normalizer = 0.0;
    erwlab_moments rawm, sq, norm;
    require_ok(erwlab_walk_result_checkpoint(result.get(), i, &n, &normalizer, &rawm, &sq, &norm));
    const double se = sq.count > 0 ? std::sqrt(sq.variance / static_cast<double>(sq.count)) : 0.0;
    const double nan = std::nan("");
    table.add({n, rawm.count, normalizer, rawm.mean, rawm.variance, rawm.min, rawm.max, sq.mean, se,
               second[static_cast<std::size_t>(n)], norm.count ? norm.mean : nan,
               norm.count ? norm.variance : nan});
    if (i + 1 == count)
      out.summary.push_back(
          std::string(erwlab_regime_name(erwlab_params_regime(params.get()))) + " n=" +
          std::to_string(n) + " normalized_variance=" + format_double(norm.variance) +
          " E[S_n^2]=" + format_double(sq.mean) + " (oracle " +
          format_double(second[static_cast<std::size_t>(n)]) + ")");
  }
  out.tables.emplace_back("ensemble", std::move(table));
  return out;
}

// ---- pair ------------------------------------------------------------------

CommandOutput run_pair(const RunConfig& c) {
  const Params params = make_params(c);
  const erwlab_ensemble_config cfg = make_config(c);
  erwlab_pair_result* raw = nullptr;
  require_ok(erwlab_pair_ensemble_run(params.get(), &cfg, &raw));
  const PairResult result(raw);

  const erwlab_regime regime = erwlab_params_regime(params.get());
  const double p = erwlab_params_p(params.get());
  std::size_t ncp = 0;
  const std::int64_t* cps = erwlab_pair_result_checkpoints(result.get(), &ncp);
  const std::size_t replicas = erwlab_pair_result_size(result.get());

  Table pairs({"replica", "meeting_count", "last_meeting", "final_diff", "normalized_final_diff",
               "sup_plus_i", "sup_minus_i", "sup_plus_ii", "sup_minus_ii"});
  Table diffs({"replica", "n", "diff", "normalized_diff"});
  std::map<std::int64_t, std::int64_t> histogram;
  std::vector<std::int64_t> last;
  double final_scale = std::nan("");
  if (c.horizon >= 16 || regime != ERWLAB_MARGINAL) {
    if (erwlab_diff_normalizer(regime, p, c.horizon, &final_scale) != ERWLAB_OK)
      final_scale = std::nan("");
  }
  for (std::size_t r = 0; r < replicas; ++r) {
    erwlab_pair_record rec;
    require_ok(erwlab_pair_result_record(result.get(), r, &rec));
    pairs.add({static_cast<std::int64_t>(r), rec.meeting_count, rec.last_meeting, rec.final_diff,
               static_cast<double>(rec.final_diff) / final_scale, rec.sup_plus_i, rec.sup_minus_i,
               rec.sup_plus_ii, rec.sup_minus_ii});
    const std::int64_t* d = erwlab_pair_result_diffs(result.get(), r);
    const double* nd = erwlab_pair_result_normalized_diffs(result.get(), r);
    for (std::size_t i = 0; i < ncp; ++i)
      diffs.add({static_cast<std::int64_t>(r), cps[i], d[i], nd[i]});
    ++histogram[rec.meeting_count];
    last.push_back(rec.last_meeting);
  }

  Table hist({"meeting_count", "pairs"});
  for (const auto& [k, v] : histogram) hist.add({k, v});

  std::sort(last.begin(), last.end());
  Table quantiles({"quantile", "last_meeting"});
  for (const double q : {0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99, 1.0}) {
    auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(last.size())));
    rank = std::clamp<std::size_t>(rank, 1, last.size());
    quantiles.add({q, last[rank - 1]});
  }

  erwlab_moments meetings;
  erwlab_pair_result_meeting_moments(result.get(), &meetings);
  erwlab_meeting_extrapolation oracle;
  require_ok(erwlab_oracle_expected_meetings(params.get(), c.horizon, c.max_n, &oracle));

  CommandOutput out;
  out.summary.push_back(
      "mean meetings=" + format_double(meetings.mean) + " se=" +
      format_double(std::sqrt(meetings.variance / static_cast<double>(meetings.count))) +
      " oracle=" + format_double(oracle.total) + " median last_meeting=" +
      std::to_string(last[std::clamp<std::size_t>((last.size() + 1) / 2, 1, last.size()) - 1]));
  out.extra["meeting_oracle"] = {{"horizon", oracle.horizon},       {"cap", oracle.cap},
                                 {"exact_part", oracle.exact_part}, {"tail_part", oracle.tail_part},
                                 {"total", oracle.total},           {"fit_constant", oracle.fit_constant},
                                 {"window_lo", oracle.window_lo},   {"window_hi", oracle.window_hi}};
  out.tables.emplace_back("pairs", std::move(pairs));
  out.tables.emplace_back("meeting_histogram", std::move(hist));
  out.tables.emplace_back("last_meeting_quantiles", std::move(quantiles));
  out.tables.emplace_back("checkpoint_diffs", std::move(diffs));

  if (regime == ERWLAB_SUPERDIFFUSIVE) {
    Table limit({"replica", "m_hat"});
    for (std::size_t r = 0; r < replicas; ++r) {
      erwlab_pair_record rec;
      erwlab_pair_result_record(result.get(), r, &rec);
      limit.add({static_cast<std::int64_t>(r), static_cast<double>(rec.final_diff) / final_scale});
    }
    out.summary.push_back("limit samples M_hat=(S_N-S'_N)/N^(2p-1): " +
                          std::to_string(limit.rows()) + " rows");
    out.tables.emplace_back("limit_samples", std::move(limit));
  }
  return out;
}

CommandOutput run_command(const RunConfig& c) {
  if (c.command == "oracle") return run_oracle(c);
  if (c.command == "ensemble") return run_ensemble(c);
  if (c.command == "pair") return run_pair(c);
  usage_error("unknown command '" + c.command + "'");
}

// Writes tables (and a manifest) into out_dir, or prints them when out_dir is
// empty. Returns the written files.
std::vector<WrittenFile> emit(const RunConfig& c, const CommandOutput& out,
                              const std::string& out_dir, const std::string& started) {
  const Format format = parse_format(c.format);
  std::vector<WrittenFile> files;
  if (out_dir.empty()) {
    for (const auto& [name, table] : out.tables) {
      if (out.tables.size() > 1) std::cout << "# " << name << file_extension(format) << '\n';
      std::cout << table.render(format);
    }
    for (const auto& line : out.summary) std::cerr << line << '\n';
    return files;
  }
  fs::create_directories(out_dir);
  for (const auto& [name, table] : out.tables) {
    const std::string file = name + file_extension(format);
    const std::string bytes = table.render(format);
    write_file(fs::path(out_dir) / file, bytes);
    files.push_back({file, sha256_hex(bytes), bytes.size()});
  }
  json manifest = {{"tool", "erwlab"},
                   {"version", erwlab_version()},
                   {"command", c.command},
                   {"config", to_json(c)},
                   {"rng_family", erwlab_rng_family()},
                   {"started_at", started},
                   {"finished_at", utc_timestamp()},
                   {"files", json::array()}};
  for (const auto& f : files) manifest["files"].push_back(to_json(f));
  if (!out.extra.empty()) manifest["results"] = out.extra;
  write_file(fs::path(out_dir) / "manifest.json", manifest.dump(2) + "\n");
  for (const auto& line : out.summary) std::cout << line << '\n';
  std::cout << "wrote " << files.size() << " file(s) and manifest.json to " << out_dir << '\n';
  return files;
}

int run_and_emit(const RunConfig& c, const std::string& out_dir) {
  parse_format(c.format);
  const std::string started = utc_timestamp();
  const CommandOutput out = run_command(c);
  emit(c, out, out_dir, started);
  return 0;
}

int run_check(const std::string& suite, std::uint64_t seed, std::int64_t replicas, int workers) {
  erwlab_check_report* raw = nullptr;
  require_ok(erwlab_check_run(suite.c_str(), seed, replicas, workers, &raw));
  const CheckReport report(raw);
  std::printf("%-4s %-6s %-66s %14s %12s  %s\n", "crit", "status", "check", "measured", "target",
              "condition");
  for (std::size_t i = 0; i < erwlab_check_report_size(report.get()); ++i) {
    erwlab_check_line l;
    require_ok(erwlab_check_report_line(report.get(), i, &l));
    std::printf("%-4d %-6s %-66s %14.6g %12.6g  %s\n", l.criterion,
                l.informational ? "info" : (l.passed ? "PASS" : "FAIL"), l.name, l.measured,
                l.target, l.condition);
  }
  const bool ok = erwlab_check_report_passed(report.get()) != 0;
  std::printf("suite %s: %s\n", suite.c_str(), ok ? "PASS" : "FAIL");
  return ok ? 0 : kExitFailure;
}

int run_replay(const std::string& manifest_path, const std::string& out_dir) {
  json manifest;
  try {
    manifest = json::parse(read_file(manifest_path));
  } catch (const std::exception& e) {
    usage_error(std::string("cannot load manifest: ") + e.what());
  }
  RunConfig c;
  try {
    c = from_json(manifest.at("config"));
  } catch (const json::exception& e) {
    usage_error(std::string("malformed manifest: ") + e.what());
  }
  const std::string started = utc_timestamp();
  const auto files = emit(c, run_command(c), out_dir, started);
  bool same = files.size() == manifest.at("files").size();
  for (const auto& recorded : manifest.at("files")) {
    const auto it = std::find_if(files.begin(), files.end(), [&](const WrittenFile& f) {
      return f.name == recorded.at("name").get<std::string>();
    });
    const bool match = it != files.end() && it->sha256 == recorded.at("sha256").get<std::string>();
    std::cout << (match ? "match    " : "MISMATCH ") << recorded.at("name").get<std::string>() << '\n';
    same = same && match;
  }
  std::cout << "replay: " << (same ? "byte-identical" : "outputs differ") << '\n';
  return same ? 0 : kExitFailure;
}

double budget_from_env() {
  const char* env = std::getenv("ERWLAB_BUDGET");
  if (env == nullptr || *env == '\0') return 1e10;
  char* end = nullptr;
  const double v = std::strtod(env, &end);
  if (end == env || *end != '\0' || !(v > 0.0)) usage_error("ERWLAB_BUDGET must be a positive number");
  return v;
}

int main_impl(int argc, char** argv) {
  CLI::App app{"erwlab: elephant random walk laboratory"};
  app.require_subcommand(1);
  app.set_version_flag("--version", erwlab_version());

  RunConfig cfg;
  std::string out_dir;

  auto add_law = [&](CLI::App* sub) {
    sub->add_option("--p", cfg.p, "memory parameter p in (0,1), decimal")->required();
    sub->add_option("--s", cfg.s, "first-step up-probability")->capture_default_str();
  };
  auto add_output = [&](CLI::App* sub) {
    sub->add_option("--format", cfg.format, "csv or jsonl")
        ->check(CLI::IsMember({"csv", "jsonl"}))
        ->capture_default_str();
    sub->add_option("--out", out_dir, "output directory (tables + manifest.json)");
  };

  auto* oracle = app.add_subcommand("oracle", "exact distribution, moments and meeting sums");
  add_law(oracle);
  oracle->add_option("--n", cfg.n, "step count")->required();
  oracle->add_option("--what", cfg.what, "pmf, diff, moments or meet")
      ->check(CLI::IsMember({"pmf", "diff", "moments", "meet"}))
      ->capture_default_str();
  oracle->add_option("--max-n", cfg.max_n, "oracle cap (default 20000)");
  add_output(oracle);

  auto add_ensemble = [&](CLI::App* sub) {
    add_law(sub);
    sub->add_option("--horizon,--n", cfg.horizon, "steps per walk")->required();
    sub->add_option("--replicas", cfg.replicas, "number of replicas")->required();
    sub->add_option("--seed", cfg.seed, "master seed")->required();
    sub->add_option("--checkpoints", cfg.checkpoints, "comma list of steps")->delimiter(',');
    sub->add_option("--workers", cfg.workers, "worker threads")->capture_default_str();
    sub->add_option("--n-min-lil", cfg.n_min_lil, "first step of sup statistics")
        ->capture_default_str();
    add_output(sub);
  };
  auto* ensemble = app.add_subcommand("ensemble", "single-walk ensemble moments");
  add_ensemble(ensemble);
  auto* pair = app.add_subcommand("pair", "independent pair ensembles: meetings, sups, limits");
  add_ensemble(pair);
  pair->add_option("--max-n", cfg.max_n, "oracle cap for the meeting prediction");

  std::string suite = "all";
  std::uint64_t check_seed = 7;
  std::int64_t check_replicas = 0;
  int check_workers = 1;
  auto* check = app.add_subcommand("check", "run acceptance checks");
  check->add_option("--suite", suite)
      ->check(CLI::IsMember({"oracle", "clt", "scaling", "meeting", "limit", "lil", "determinism", "all"}))
      ->capture_default_str();
  check->add_option("--seed", check_seed)->capture_default_str();
  check->add_option("--replicas", check_replicas, "override Monte Carlo replica counts");
  check->add_option("--workers", check_workers)->capture_default_str();

  std::string manifest_path;
  auto* replay = app.add_subcommand("replay", "re-run a command from its manifest and compare digests");
  replay->add_option("--manifest", manifest_path)->required();
  replay->add_option("--out", out_dir, "directory for the regenerated outputs")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  if (check->parsed()) return run_check(suite, check_seed, check_replicas, check_workers);
  if (replay->parsed()) return run_replay(manifest_path, out_dir);

  cfg.command = app.get_subcommands().front()->get_name();
  if (cfg.command != "oracle") {
    if (cfg.workers < 1) usage_error("--workers must be >= 1");
    cfg.budget = budget_from_env();
    if (cfg.checkpoints.empty()) cfg.checkpoints = {cfg.horizon};
  }
  return run_and_emit(cfg, out_dir);
}

}  // namespace
}  // namespace erwlab::cli

int main(int argc, char** argv) {
  try {
    return erwlab::cli::main_impl(argc, argv);
  } catch (const erwlab::cli::ExitError& e) {
    std::cerr << "error: " << e.message << '\n';
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
