#include "rmnl/simulator.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "rmnl/experiment.hpp"

namespace rmnl {
namespace {

class FixedPolicy final : public Policy {
 public:
  explicit FixedPolicy(Assortment s) : s_(std::move(s)) {}
  Assortment offer(Rng&) override { return s_; }
  void observe(Item) override {}

 private:
  Assortment s_;
};

TEST(BenchmarkInstance, Structure) {
  Rng rng(1);
  const GeneratedInstance g = generate_benchmark_instance(30, 5, 1000, rng);
  ASSERT_EQ(g.instance.n_items, 30);
  for (Item i = 1; i <= 30; ++i) {
    if (i <= 5) {
      EXPECT_EQ(g.instance.revenue(i), 1.0);
      EXPECT_EQ(g.instance.utility(i), 0.0);
      EXPECT_EQ(g.outlier_utilities[static_cast<std::size_t>(i - 1)], 1.0);
    } else {
      EXPECT_GE(g.instance.revenue(i), 0.1);
      EXPECT_LE(g.instance.revenue(i), 0.2);
      EXPECT_GE(g.instance.utility(i), 0.1);
      EXPECT_LE(g.instance.utility(i), 0.2);
      EXPECT_EQ(g.outlier_utilities[static_cast<std::size_t>(i - 1)], g.instance.utility(i));
    }
  }
  EXPECT_EQ(std::count(g.outlier_utilities.begin(), g.outlier_utilities.end(), 1.0), 5);
}

TEST(BenchmarkInstance, RejectsCapacityAtLeastItems) {
  Rng rng(1);
  EXPECT_THROW(generate_benchmark_instance(5, 5, 100, rng), InputError);
  EXPECT_THROW(generate_benchmark_instance(5, 0, 100, rng), InputError);
}

TEST(BenchmarkInstance, OptimumAvoidsZeroUtilityItems) {
  Rng rng(2);
  const GeneratedInstance g = generate_benchmark_instance(15, 3, 100, rng);
  const Optimum opt = true_optimum(g.instance);
  for (Item i : opt.assortment) EXPECT_GT(i, 3);
  EXPECT_GT(opt.revenue, 0.0);
}

TEST(Episode, OraclePolicyHasZeroRegret) {
  Rng rng(3);
  const GeneratedInstance g = generate_benchmark_instance(10, 3, 500, rng);
  FixedPolicy oracle(true_optimum(g.instance).assortment);
  const AdversarySchedule s{0.1, AdversaryKind::kFrontLoaded, g.outlier_utilities, {}};
  const RegretTrace tr = run_episode(oracle, g.instance, s, 5);
  for (double x : tr.instantaneous) EXPECT_NEAR(x, 0.0, 1e-12);
  EXPECT_EQ(tr.outlier_periods, 50u);
}

TEST(Episode, EmptyOfferLosesOptimalRevenueEachPeriod) {
  Rng rng(4);
  const GeneratedInstance g = generate_benchmark_instance(10, 3, 200, rng);
  FixedPolicy empty({});
  const double best = true_optimum(g.instance).revenue;
  const RegretTrace tr = run_episode(empty, g.instance, AdversarySchedule{}, 5);
  for (double x : tr.instantaneous) EXPECT_EQ(x, best);
  EXPECT_NEAR(tr.average(200), best, 1e-12);
}

TEST(Episode, ProtocolViolations) {
  Rng rng(5);
  const GeneratedInstance g = generate_benchmark_instance(10, 2, 20, rng);
  FixedPolicy too_many({4, 5, 6});
  EXPECT_THROW(run_episode(too_many, g.instance, AdversarySchedule{}, 1), ProtocolViolation);
  FixedPolicy bad_item({11});
  EXPECT_THROW(run_episode(bad_item, g.instance, AdversarySchedule{}, 1), ProtocolViolation);
  FixedPolicy dup({4, 4});
  EXPECT_THROW(run_episode(dup, g.instance, AdversarySchedule{}, 1), ProtocolViolation);
}

TEST(Episode, AdversaryCommitsBeforeOffer) {
  Rng rng(6);
  const GeneratedInstance g = generate_benchmark_instance(6, 2, 300, rng);
  AdversarySchedule s;
  s.epsilon = 0.2;
  s.kind = AdversaryKind::kAdaptiveHook;
  auto inner = make_demote_leader_hook(0.2, 6);
  s.hook = [inner](const History& h, int t, std::size_t left) {
    EXPECT_EQ(h.size(), static_cast<std::size_t>(t - 1));
    return inner(h, t, left);
  };
  ActiveElimination p(ProblemView::of(g.instance), RobustOptions{0.2, 1.0, 20L});
  History h(6);
  EpisodeStreams streams = EpisodeStreams::from_seed(3);
  const RegretTrace tr = run_episode(p, g.instance, s, streams, &h);
  EXPECT_EQ(tr.outlier_periods, 60u);
  EXPECT_EQ(h.size(), 300u);
}

TEST(Episode, SeedFixesTrace) {
  Rng rng(7);
  const GeneratedInstance g = generate_benchmark_instance(12, 3, 2000, rng);
  const AdversarySchedule s{0.1, AdversaryKind::kFrontLoaded, g.outlier_utilities, {}};
  auto run = [&](std::uint64_t seed) {
    ActiveElimination p(ProblemView::of(g.instance), RobustOptions{0.1, 1.0, 40L});
    return run_episode(p, g.instance, s, seed).instantaneous;
  };
  EXPECT_EQ(run(11), run(11));
  EXPECT_NE(run(11), run(12));
}

TEST(Episode, RegretBoundsHold) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng = make_stream(seed, Stream::kInstance);
    const GeneratedInstance g = generate_benchmark_instance(10, 3, 3000, rng);
    const AdversarySchedule s{0.1, AdversaryKind::kFrontLoaded, g.outlier_utilities, {}};
    ThompsonPolicy p(ProblemView::of(g.instance));
    const RegretTrace tr = run_episode(p, g.instance, s, seed);
    for (std::size_t t = 0; t < tr.instantaneous.size(); ++t) {
      EXPECT_GE(tr.instantaneous[t], -1e-12);
      EXPECT_LE(tr.instantaneous[t], 1.0);
      if (t > 0) {
        EXPECT_GE(tr.cumulative[t], tr.cumulative[t - 1]);
      }
      const double avg = tr.average(t + 1);
      EXPECT_GE(avg, -1e-12);
      EXPECT_LE(avg, 1.0);
    }
  }
}

TEST(DeltaStar, SurvivingTermAtZeroContamination) {
  const double horizon = 5000, len = 800;
  const int k = 3, n = 6;
  EXPECT_NEAR(delta_star_diagnostic(k, 0.0, horizon, len, n, 0.5, 0.0),
              8.0 * (k + 1) * 2 * n * std::log(horizon) / (3 * len), 1e-15);
}

TEST(DeltaStar, HandEvaluatedExample) {
  // K = 1, eps = 0, N = 1, ln T = 1, T_tau = 1e4, V_S = 1, v_i = 1:
  // 16 * 2 / 3e4 + 8 sqrt(2e-4).
  const double expected = 16.0 * 2.0 / 3e4 + 8.0 * std::sqrt(2e-4);
  const double got = delta_star_diagnostic(1, 0.0, std::exp(1.0), 1e4, 1, 1.0, 1.0);
  EXPECT_NEAR(got, expected, 1e-15);
  EXPECT_NEAR(got, 0.11420375165651427, 1e-12);
}

TEST(DeltaStar, MonotoneInContamination) {
  Rng rng(8);
  for (int rep = 0; rep < 2000; ++rep) {
    double a = uniform01(rng), b = uniform01(rng);
    if (a > b) std::swap(a, b);
    const double horizon = 10 + uniform01(rng) * 1e6;
    const double len = 1 + uniform01(rng) * horizon;
    const int k = 1 + static_cast<int>(uniform_index(rng, 5));
    const double vs = uniform01(rng) * k;
    const double vi = uniform01(rng);
    EXPECT_LE(delta_star_diagnostic(k, a, horizon, len, 4, vs, vi),
              delta_star_diagnostic(k, b, horizon, len, 4, vs, vi));
  }
}

TEST(Checkpoints, Defaults) {
  EXPECT_EQ(default_checkpoints(20000), std::vector<int>({5000, 10000, 15000, 20000}));
  EXPECT_EQ(default_checkpoints(2), std::vector<int>({1, 2}));
  EXPECT_EQ(grid_checkpoints(100, 4), std::vector<int>({25, 50, 75, 100}));
  EXPECT_EQ(grid_checkpoints(3, 50), std::vector<int>({1, 2, 3}));
  const auto g = grid_checkpoints(20000, 50);
  EXPECT_EQ(g.size(), 50u);
  EXPECT_EQ(g.back(), 20000);
  EXPECT_TRUE(std::is_sorted(g.begin(), g.end()));
}

TEST(Aggregate, SingleTrialHasZeroSd) {
  const auto s = aggregate({10, 20}, {{0.5, 0.25}});
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0].mean, 0.5);
  EXPECT_EQ(s[0].sd, 0.0);
  EXPECT_EQ(s[1].trials, 1);
}

TEST(Aggregate, SampleStandardDeviation) {
  const auto s = aggregate({1}, {{1.0}, {2.0}, {3.0}, {4.0}});
  EXPECT_DOUBLE_EQ(s[0].mean, 2.5);
  EXPECT_DOUBLE_EQ(s[0].sd, std::sqrt(5.0 / 3.0));
}

TEST(Aggregate, StandardErrorShrinksLikeRootTrials) {
  // Across meta-runs, the variance of a mean over 2n trials is half that
  // over n trials; check the ratio of empirical variances.
  Rng rng(9);
  constexpr int kMeta = 4000, kN = 10;
  auto var_of_means = [&](int n) {
    std::vector<double> means;
    for (int m = 0; m < kMeta; ++m) {
      std::vector<std::vector<double>> values;
      for (int t = 0; t < n; ++t) values.push_back({uniform01(rng)});
      means.push_back(aggregate({1}, values)[0].mean);
    }
    std::vector<std::vector<double>> rows;
    for (double x : means) rows.push_back({x});
    const double sd = aggregate({1}, rows)[0].sd;
    return sd * sd;
  };
  const double ratio = var_of_means(kN) / var_of_means(2 * kN);
  // Ratio of two chi-square variance estimates with 3999 dof each:
  // sd of the ratio ≈ 2 * sqrt(2 * 2 / 3999) ≈ 0.063.
  EXPECT_NEAR(ratio, 2.0, 3 * 0.064);
}

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.n = 8;
  c.k = 2;
  c.t = 1500;
  c.eps = 0.1;
  c.policies = {PolicyKind::kActiveElim, PolicyKind::kAdaptive, PolicyKind::kUcb,
                PolicyKind::kTs};
  c.trials = 4;
  c.seed = 100;
  c.checkpoints = 10;
  return c;
}

TEST(RunTrials, SingleTrialAggregates) {
  ExperimentConfig c = small_config();
  c.trials = 1;
  const ExperimentResult r = run_trials(c, default_checkpoints(c.t), 1);
  for (const auto& pr : r.policies)
    for (std::size_t i = 0; i < pr.stats.size(); ++i) {
      EXPECT_EQ(pr.stats[i].sd, 0.0);
      EXPECT_DOUBLE_EQ(pr.stats[i].mean, pr.trials[0].cumulative[i] / r.checkpoints[i]);
    }
}

TEST(RunTrials, IndependentOfWorkerCount) {
  const ExperimentConfig c = small_config();
  const auto cps = run_trials_checkpoints(c);
  std::ostringstream a, b, aa, ba;
  const ExperimentResult r1 = run_trials(c, cps, 1);
  const ExperimentResult r4 = run_trials(c, cps, 4);
  write_trace_csv(a, r1);
  write_trace_csv(b, r4);
  write_aggregate_csv(aa, r1);
  write_aggregate_csv(ba, r4);
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(aa.str(), ba.str());
}

TEST(RunTrials, TrialSeedIsBasePlusIndex) {
  const ExperimentConfig c = small_config();
  const ExperimentResult r = run_trials(c, {c.t}, 2);
  for (const auto& pr : r.policies)
    for (std::size_t i = 0; i < pr.trials.size(); ++i) {
      EXPECT_EQ(pr.trials[i].trial, static_cast<int>(i));
      EXPECT_EQ(pr.trials[i].seed, c.seed + i);
      const TrialOutcome alone = run_single_trial(c, pr.kind, static_cast<int>(i), {c.t});
      EXPECT_EQ(alone.cumulative, pr.trials[i].cumulative);
    }
}

TEST(Csv, SchemaAndOrdering) {
  ExperimentConfig c = small_config();
  c.trials = 2;
  const ExperimentResult r = run_trials(c, grid_checkpoints(c.t, 5), 1);
  std::ostringstream trace, agg;
  write_trace_csv(trace, r);
  write_aggregate_csv(agg, r);
  std::istringstream tin(trace.str());
  std::string line;
  std::getline(tin, line);
  EXPECT_EQ(line, "policy,trial,seed,t,cum_regret,avg_regret");
  int rows = 0, prev_t = 0;
  while (std::getline(tin, line)) {
    ++rows;
    std::istringstream ls(line);
    std::string policy, trial, seed, t;
    std::getline(ls, policy, ',');
    std::getline(ls, trial, ',');
    std::getline(ls, seed, ',');
    std::getline(ls, t, ',');
    const int tv = std::stoi(t);
    if (tv != 300) {
      EXPECT_GT(tv, prev_t);
    }
    prev_t = tv;
  }
  EXPECT_EQ(rows, 4 * 2 * 5);
  std::istringstream ain(agg.str());
  std::getline(ain, line);
  EXPECT_EQ(line, "policy,t,mean_avg_regret,sd_avg_regret,trials");
}

}  // namespace
}  // namespace rmnl
