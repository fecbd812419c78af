// rmnl: run contamination-robust MNL bandit experiments.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rmnl/config.hpp"
#include "rmnl/experiment.hpp"
#include "rmnl/version.hpp"
#include "selftest.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitSelftest = 3;
constexpr int kExitRuntime = 1;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw rmnl::ConfigError(path + ": cannot open config file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

// Flag values layered over the config file, keyed like the file.
struct Overrides {
  std::optional<std::string> policy;
  std::optional<double> eps;
  std::optional<double> eps_bar;
  std::optional<long long> n, k, t, trials, seed;
  std::optional<std::string> out;
  bool full_trace = false;

  void apply(rmnl::ConfigMap& m) const {
    auto set = [&m](const char* key, const char* flag, std::string value) {
      m[key] = {std::move(value), flag};
    };
    auto num = [](double x) { return rmnl::detail::fmt_double(x); };
    if (policy) set("policy", "--policy", *policy);
    if (eps) set("eps", "--eps", num(*eps));
    if (eps_bar) set("eps_bar", "--eps-bar", num(*eps_bar));
    if (n) set("n", "--n", std::to_string(*n));
    if (k) set("k", "--k", std::to_string(*k));
    if (t) set("t", "--t", std::to_string(*t));
    if (trials) set("trials", "--trials", std::to_string(*trials));
    if (seed) set("seed", "--seed", std::to_string(*seed));
    if (out) set("out", "--out", *out);
    if (full_trace) set("full_trace", "--full-trace", "true");
  }
};

int cmd_run(const std::optional<std::string>& config_path, const Overrides& ov, unsigned jobs) {
  rmnl::ConfigMap map;
  if (config_path) map = rmnl::parse_config_text(read_file(*config_path), *config_path);
  ov.apply(map);
  const rmnl::ExperimentConfig c = rmnl::resolve_config(map);

  const auto started = std::chrono::steady_clock::now();
  const auto checkpoints = rmnl::run_trials_checkpoints(c);
  const rmnl::ExperimentResult result = rmnl::run_trials(c, checkpoints, jobs);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  const fs::path out(c.out);
  fs::create_directories(out);
  std::ostringstream traces, agg;
  rmnl::write_trace_csv(traces, result);
  rmnl::write_aggregate_csv(agg, result);
  const std::string config_text = rmnl::to_config_text(c);
  write_file(out / "traces.csv", traces.str());
  write_file(out / "aggregate.csv", agg.str());
  write_file(out / "config.resolved", config_text);

  json policies = json::array();
  for (rmnl::PolicyKind p : c.policies) policies.push_back(rmnl::policy_name(p));
  json manifest = {
      {"version", rmnl::kVersion},
      {"config", {{"n", c.n}, {"k", c.k}, {"t", c.t}, {"eps", c.eps},
                  {"eps_bar", c.resolved_eps_bar()}, {"policies", policies},
                  {"adversary", rmnl::adversary_name(c.adversary)}, {"trials", c.trials},
                  {"seed", c.seed}, {"full_trace", c.full_trace},
                  {"checkpoints", c.checkpoints}, {"ucb_c1", c.ucb_c1},
                  {"ucb_margin", c.ucb_margin}, {"delta", c.delta}}},
      {"config_text", config_text},
      {"resolved",
       {{"eps_bar", c.resolved_eps_bar()},
        {"explore_scale", rmnl::resolved_elimination_scale(c)},
        {"adaptive_explore_scale", rmnl::resolved_adaptive_scale(c)}}},
      {"jobs", jobs},
      {"wall_clock_seconds", seconds},
      {"files",
       {{"traces", (out / "traces.csv").string()},
        {"aggregate", (out / "aggregate.csv").string()},
        {"config", (out / "config.resolved").string()}}},
  };
  write_file(out / "manifest.json", manifest.dump(2) + "\n");

  for (const auto& pr : result.policies) {
    const auto& last = pr.stats.back();
    std::printf("%-12s t=%d mean_avg_regret=%.6f sd=%.6f trials=%d\n",
                rmnl::policy_name(pr.kind), last.t, last.mean, last.sd, last.trials);
  }
  std::printf("wrote %s\n", out.string().c_str());
  return kExitOk;
}

struct Preset {
  int n;
  int k;
};

const std::map<std::string, Preset>& presets() {
  static const std::map<std::string, Preset> p = {
      {"N100K10", {100, 10}}, {"N100K20", {100, 20}}, {"N300K10", {300, 10}}, {"N300K20", {300, 20}}};
  return p;
}

int cmd_fig1(const std::string& preset_name, double eps, int trials, std::uint64_t seed,
             unsigned jobs, const std::string& out_dir) {
  const auto it = presets().find(preset_name);
  if (it == presets().end()) {
    std::cerr << "error: unknown preset '" << preset_name
              << "' (expected N100K10, N100K20, N300K10 or N300K20)\n";
    return kExitUsage;
  }
  if (eps != 0.0 && eps != 0.05 && eps != 0.1) {
    std::cerr << "error: --eps must be 0, 0.05 or 0.1\n";
    return kExitUsage;
  }
  const Preset p = it->second;

  std::ostringstream csv;
  csv << "policy,T,t,mean,sd,trials\n";
  std::map<std::string, std::vector<std::string>> by_policy;
  const std::vector<rmnl::PolicyKind> order =
      rmnl::figure_config(p.n, p.k, 1000, eps, trials, seed).policies;
  for (int horizon : rmnl::kFigureHorizons) {
    const rmnl::ExperimentConfig c = rmnl::figure_config(p.n, p.k, horizon, eps, trials, seed);
    const rmnl::ExperimentResult r = rmnl::run_trials(c, rmnl::default_checkpoints(horizon), jobs);
    for (const auto& pr : r.policies) {
      for (const auto& s : pr.stats) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s,%d,%d,%.12g,%.12g,%d\n", rmnl::policy_name(pr.kind),
                      horizon, s.t, s.mean, s.sd, s.trials);
        by_policy[rmnl::policy_name(pr.kind)].push_back(buf);
      }
      std::printf("%-12s T=%-6d mean_avg_regret=%.6f sd=%.6f\n", rmnl::policy_name(pr.kind),
                  horizon, pr.stats.back().mean, pr.stats.back().sd);
    }
  }
  for (rmnl::PolicyKind k : order)
    for (const auto& row : by_policy[rmnl::policy_name(k)]) csv << row;

  const fs::path out(out_dir);
  fs::create_directories(out);
  char eps_tag[32];
  std::snprintf(eps_tag, sizeof eps_tag, "%g", eps);
  const fs::path file = out / ("fig1_" + preset_name + "_eps" + eps_tag + ".csv");
  write_file(file, csv.str());
  std::printf("wrote %s\n", file.string().c_str());
  return kExitOk;
}

int cmd_selftest() {
  bool all_ok = true;
  const auto started = std::chrono::steady_clock::now();
  for (const auto& suite : rmnl::selftest::default_suites()) {
    const rmnl::selftest::SuiteResult r = suite();
    const bool ok = r.failing_seeds.empty();
    all_ok = all_ok && ok;
    std::printf("%s %-28s cases=%ld failures=%zu", ok ? "PASS" : "FAIL", r.name.c_str(), r.cases,
                r.failing_seeds.size());
    if (!r.note.empty()) std::printf(" (%s)", r.note.c_str());
    std::printf("\n");
    for (std::uint64_t s : r.failing_seeds) std::printf("  failing seed %llu\n",
                                                        static_cast<unsigned long long>(s));
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  std::printf("selftest %s in %.1f s\n", all_ok ? "passed" : "FAILED", seconds);
  return all_ok ? kExitOk : kExitSelftest;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Contamination-robust MNL bandit experiments"};
  app.set_version_flag("--version", std::string(rmnl::kVersion));
  app.require_subcommand(1);

  unsigned jobs = rmnl::default_jobs();

  auto* run = app.add_subcommand("run", "Run trials for one configuration and write CSVs");
  std::optional<std::string> config_path;
  Overrides ov;
  run->add_option("--config", config_path, "Config file (key = value lines)");
  run->add_option("--policy", ov.policy, "active_elim, adaptive, ucb, ts, a comma list, or all");
  run->add_option("--eps", ov.eps, "True outlier proportion");
  run->add_option("--eps-bar", ov.eps_bar, "Contamination bound given to active_elim");
  run->add_option("--n", ov.n, "Number of items");
  run->add_option("--k", ov.k, "Assortment capacity");
  run->add_option("--t", ov.t, "Horizon");
  run->add_option("--trials", ov.trials, "Number of trials");
  run->add_option("--seed", ov.seed, "Base seed; trial i uses seed + i");
  run->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  run->add_option("--out", ov.out, "Output directory");
  run->add_flag("--full-trace", ov.full_trace, "Write every period instead of 50 checkpoints");

  auto* fig = app.add_subcommand("reproduce-fig1", "Regret-vs-horizon curves for all policies");
  std::string preset = "N100K10";
  double fig_eps = 0.1;
  int fig_trials = 20;
  bool fig_full = false;
  std::uint64_t fig_seed = 0;
  std::string fig_out = "out";
  fig->add_option("--preset", preset, "N100K10, N100K20, N300K10 or N300K20");
  fig->add_option("--eps", fig_eps, "Outlier proportion: 0, 0.05 or 0.1");
  fig->add_option("--trials", fig_trials, "Trials per horizon")->check(CLI::PositiveNumber);
  fig->add_flag("--full", fig_full, "Use 100 trials");
  fig->add_option("--seed", fig_seed, "Base seed");
  fig->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  fig->add_option("--out", fig_out, "Output directory");

  auto* self = app.add_subcommand("selftest", "Run built-in oracle and invariant suites");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*run) return cmd_run(config_path, ov, jobs);
    if (*fig) return cmd_fig1(preset, fig_eps, fig_full ? 100 : fig_trials, fig_seed, jobs, fig_out);
    if (*self) return cmd_selftest();
  } catch (const rmnl::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const rmnl::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
