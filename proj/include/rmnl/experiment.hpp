#pragma once

// Multi-trial experiment runner and CSV output.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <memory>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "rmnl/config.hpp"
#include "rmnl/policy_adaptive.hpp"
#include "rmnl/policy_baselines.hpp"
#include "rmnl/policy_robust.hpp"
#include "rmnl/simulator.hpp"

namespace rmnl {

// explore_scale giving the known-contamination policy T_0 ≈ T_ref / 64.
inline double auto_elimination_scale(int n, int k, int horizon, int reference_horizon) {
  const double base = 128.0 * (k + 1.0) * (k + 1.0) * n * std::log(horizon);
  return base > 0.0 ? (reference_horizon / 64.0) / base : 1.0;
}

// explore_scale giving the adaptive policy T_0 ≈ T_ref / 64.
inline double auto_adaptive_scale(int k, int horizon, int reference_horizon) {
  const double base = 64.0 * (k + 1.0) * (k + 1.0) * std::log(horizon);
  return base > 0.0 ? (reference_horizon / 64.0) / base : 1.0;
}

inline double resolved_elimination_scale(const ExperimentConfig& c) {
  return c.explore_scale.value_or(auto_elimination_scale(c.n, c.k, c.t, c.t));
}

inline double resolved_adaptive_scale(const ExperimentConfig& c) {
  return c.adaptive_explore_scale.value_or(auto_adaptive_scale(c.k, c.t, c.t));
}

// Horizon whose T/64 sets the exploration scales of the regret-vs-T
// presets; keeping it fixed across the grid means only T varies.
inline constexpr int kFigureReferenceHorizon = 20000;
inline constexpr int kFigureHorizons[] = {1000, 2000, 5000, 10000, 20000};

// All four policies on the contaminated instance for one horizon.
inline ExperimentConfig figure_config(int n, int k, int horizon, double eps, int trials,
                                      std::uint64_t seed) {
  ExperimentConfig c;
  c.n = n;
  c.k = k;
  c.t = horizon;
  c.eps = eps;
  c.trials = trials;
  c.seed = seed;
  c.policies = {PolicyKind::kActiveElim, PolicyKind::kAdaptive, PolicyKind::kUcb, PolicyKind::kTs};
  c.ucb_c1 = 0.01;
  c.explore_scale = auto_elimination_scale(n, k, kFigureReferenceHorizon, kFigureReferenceHorizon);
  c.adaptive_explore_scale = auto_adaptive_scale(k, kFigureReferenceHorizon, kFigureReferenceHorizon);
  return c;
}

inline std::unique_ptr<Policy> make_policy(PolicyKind kind, const ExperimentConfig& c,
                                           const ProblemView& problem) {
  switch (kind) {
    case PolicyKind::kActiveElim: {
      RobustOptions o;
      o.eps_bar = c.resolved_eps_bar();
      o.explore_scale = resolved_elimination_scale(c);
      o.delta = c.delta;
      return std::make_unique<ActiveElimination>(problem, o);
    }
    case PolicyKind::kAdaptive: {
      AdaptiveOptions o;
      o.explore_scale = resolved_adaptive_scale(c);
      o.delta = c.delta;
      return std::make_unique<AdaptiveElimination>(problem, o);
    }
    case PolicyKind::kUcb:
      return std::make_unique<UcbPolicy>(problem, UcbOptions{c.ucb_c1, c.ucb_margin, c.delta});
    case PolicyKind::kTs:
      return std::make_unique<ThompsonPolicy>(problem, c.delta);
  }
  throw InputError("unknown policy kind");
}

inline AdversarySchedule make_schedule(const ExperimentConfig& c, const GeneratedInstance& g) {
  AdversarySchedule s;
  s.epsilon = c.eps;
  s.kind = c.adversary;
  if (c.adversary == AdversaryKind::kFrontLoaded) s.outlier_utilities = g.outlier_utilities;
  if (c.adversary == AdversaryKind::kAdaptiveHook)
    s.hook = make_demote_leader_hook(c.eps, g.instance.n_items);
  return s;
}

struct TrialOutcome {
  int trial = 0;
  std::uint64_t seed = 0;
  std::vector<double> cumulative;  // at each checkpoint
  std::size_t outlier_periods = 0;
};

struct PolicyResult {
  PolicyKind kind = PolicyKind::kActiveElim;
  std::vector<TrialOutcome> trials;  // ordered by trial index
  std::vector<CheckpointStats> stats;
};

struct ExperimentResult {
  std::vector<int> checkpoints;
  std::vector<PolicyResult> policies;  // config order

  const PolicyResult& of(PolicyKind k) const {
    for (const auto& p : policies)
      if (p.kind == k) return p;
    throw InputError(std::string("no result for policy ") + policy_name(k));
  }
};

// Trial `i` uses seed base + i for its instance, adversary, policy and
// customer streams, so the same trial index sees the same instance and
// outliers under every policy.
inline TrialOutcome run_single_trial(const ExperimentConfig& c, PolicyKind kind, int trial,
                                     const std::vector<int>& checkpoints) {
  const std::uint64_t seed = c.seed + static_cast<std::uint64_t>(trial);
  Rng inst_rng = make_stream(seed, Stream::kInstance);
  const GeneratedInstance g = generate_benchmark_instance(c.n, c.k, c.t, inst_rng);
  const AdversarySchedule schedule = make_schedule(c, g);
  auto policy = make_policy(kind, c, ProblemView::of(g.instance));
  const RegretTrace trace = run_episode(*policy, g.instance, schedule, seed);

  TrialOutcome out;
  out.trial = trial;
  out.seed = seed;
  out.outlier_periods = trace.outlier_periods;
  out.cumulative.reserve(checkpoints.size());
  for (int t : checkpoints) out.cumulative.push_back(trace.cumulative[static_cast<std::size_t>(t - 1)]);
  return out;
}

inline unsigned default_jobs() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

// Runs every (policy, trial) pair, in parallel over `jobs` workers. Results
// land in fixed slots, so output does not depend on scheduling.
inline ExperimentResult run_trials(const ExperimentConfig& c, const std::vector<int>& checkpoints,
                                   unsigned jobs = 1) {
  for (int t : checkpoints)
    if (t < 1 || t > c.t) throw InputError("checkpoint outside 1..T");
  ExperimentResult res;
  res.checkpoints = checkpoints;
  res.policies.resize(c.policies.size());
  for (std::size_t p = 0; p < c.policies.size(); ++p) {
    res.policies[p].kind = c.policies[p];
    res.policies[p].trials.resize(static_cast<std::size_t>(c.trials));
  }

  const std::size_t total = c.policies.size() * static_cast<std::size_t>(c.trials);
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(total);
  auto worker = [&] {
    for (std::size_t job = next++; job < total; job = next++) {
      const std::size_t p = job / static_cast<std::size_t>(c.trials);
      const int trial = static_cast<int>(job % static_cast<std::size_t>(c.trials));
      try {
        res.policies[p].trials[static_cast<std::size_t>(trial)] =
            run_single_trial(c, c.policies[p], trial, checkpoints);
      } catch (...) {
        errors[job] = std::current_exception();
      }
    }
  };
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(total)));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  for (auto& pr : res.policies) {
    std::vector<std::vector<double>> avg;
    for (const auto& tr : pr.trials) {
      std::vector<double> row;
      for (std::size_t i = 0; i < checkpoints.size(); ++i)
        row.push_back(tr.cumulative[i] / checkpoints[i]);
      avg.push_back(std::move(row));
    }
    pr.stats = aggregate(checkpoints, avg);
  }
  return res;
}

inline std::vector<int> run_trials_checkpoints(const ExperimentConfig& c) {
  if (c.full_trace) return grid_checkpoints(c.t, c.t);
  return grid_checkpoints(c.t, c.checkpoints);
}

namespace detail {
inline std::string fmt_num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}
}  // namespace detail

// policy,trial,seed,t,cum_regret,avg_regret
inline void write_trace_csv(std::ostream& os, const ExperimentResult& r) {
  os << "policy,trial,seed,t,cum_regret,avg_regret\n";
  for (const auto& pr : r.policies)
    for (const auto& tr : pr.trials)
      for (std::size_t i = 0; i < r.checkpoints.size(); ++i) {
        const int t = r.checkpoints[i];
        os << policy_name(pr.kind) << ',' << tr.trial << ',' << tr.seed << ',' << t << ','
           << detail::fmt_num(tr.cumulative[i]) << ',' << detail::fmt_num(tr.cumulative[i] / t)
           << '\n';
      }
}

// policy,t,mean_avg_regret,sd_avg_regret,trials
inline void write_aggregate_csv(std::ostream& os, const ExperimentResult& r) {
  os << "policy,t,mean_avg_regret,sd_avg_regret,trials\n";
  for (const auto& pr : r.policies)
    for (const auto& s : pr.stats)
      os << policy_name(pr.kind) << ',' << s.t << ',' << detail::fmt_num(s.mean) << ','
         << detail::fmt_num(s.sd) << ',' << s.trials << '\n';
}

}  // namespace rmnl
