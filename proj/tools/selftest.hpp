#pragma once

// Built-in correctness suites for `rmnl selftest`.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "rmnl/diagnostics.hpp"
#include "rmnl/experiment.hpp"
#include "rmnl/optimizer.hpp"
#include "rmnl/policy_robust.hpp"

namespace rmnl::selftest {

struct SuiteResult {
  std::string name;
  long cases = 0;
  std::vector<std::uint64_t> failing_seeds;
  std::string note;
};

// Optimizer vs exhaustive search; every must-include choice plus the
// unconstrained problem, N <= 12, K <= 4.
inline SuiteResult optimizer_oracle(int instances) {
  SuiteResult res{"optimizer-vs-brute-force", 0, {}, {}};
  for (int s = 0; s < instances; ++s) {
    const auto seed = static_cast<std::uint64_t>(s);
    Rng rng = make_stream(seed, Stream::kInstance);
    const int n = 1 + static_cast<int>(uniform_index(rng, 12));
    const int k = 1 + static_cast<int>(uniform_index(rng, 4));
    std::vector<double> r(static_cast<std::size_t>(n)), v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      r[static_cast<std::size_t>(i)] = uniform01(rng);
      v[static_cast<std::size_t>(i)] = uniform01(rng);
    }
    bool ok = std::abs(static_assortment_opt(r, v, k, 1e-9).estimated_revenue -
                       brute_force_opt(r, v, k).estimated_revenue) <= 1e-6;
    ++res.cases;
    for (Item m = 1; m <= n; ++m, ++res.cases)
      ok = ok && std::abs(constrained_assortment_opt(r, v, k, m, 1e-9).estimated_revenue -
                          brute_force_opt(r, v, k, m).estimated_revenue) <= 1e-6;
    if (!ok) res.failing_seeds.push_back(seed);
  }
  return res;
}

inline Assortment random_subset(Rng& rng, int n, int max_size) {
  Assortment s;
  for (Item i = 1; i <= n && static_cast<int>(s.size()) < max_size; ++i)
    if (uniform01(rng) < 0.5) s.push_back(i);
  return s;
}

// Normalization and R(S) = sum r_i P(i) on random (S, v).
inline SuiteResult choice_invariants(int draws) {
  SuiteResult res{"choice-invariants", 0, {}, {}};
  for (int s = 0; s < draws; ++s) {
    const auto seed = static_cast<std::uint64_t>(s);
    Rng rng = make_stream(seed, Stream::kCustomer);
    const int n = 1 + static_cast<int>(uniform_index(rng, 50));
    std::vector<double> r(static_cast<std::size_t>(n)), v(static_cast<std::size_t>(n));
    for (auto& x : r) x = uniform01(rng);
    for (auto& x : v) x = uniform01(rng);
    const Assortment a = random_subset(rng, n, n);
    const ChoiceDistribution d = choice_probabilities(a, v);
    double total = 0.0, weighted = 0.0;
    bool ok = true;
    for (double p : d.probs) {
      total += p;
      ok = ok && p >= 0.0;
    }
    for (Item i : a) weighted += r[static_cast<std::size_t>(i - 1)] * d.prob_of(i);
    ok = ok && std::abs(total - 1.0) <= 1e-12 &&
         std::abs(expected_revenue(a, r, v) - weighted) <= 1e-12;
    ++res.cases;
    if (!ok) res.failing_seeds.push_back(seed);
  }
  return res;
}

// |R(S; v̂) - R(S; v)| <= 2 sum |v̂ - v| / (1 + sum v), |S| <= 10.
inline SuiteResult revenue_perturbation(int draws) {
  SuiteResult res{"revenue-perturbation-bound", 0, {}, {}};
  for (int s = 0; s < draws; ++s) {
    const auto seed = static_cast<std::uint64_t>(s);
    Rng rng = make_stream(seed, Stream::kPolicy);
    const int n = 1 + static_cast<int>(uniform_index(rng, 20));
    std::vector<double> r(static_cast<std::size_t>(n)), v(static_cast<std::size_t>(n)),
        vh(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      r[static_cast<std::size_t>(i)] = uniform01(rng);
      v[static_cast<std::size_t>(i)] = uniform01(rng);
      vh[static_cast<std::size_t>(i)] = uniform01(rng);
    }
    const Assortment a = random_subset(rng, n, 10);
    double diff = 0.0, vs = 0.0;
    for (Item i : a) {
      diff += std::abs(vh[static_cast<std::size_t>(i - 1)] - v[static_cast<std::size_t>(i - 1)]);
      vs += v[static_cast<std::size_t>(i - 1)];
    }
    const double lhs = std::abs(expected_revenue(a, r, vh) - expected_revenue(a, r, v));
    ++res.cases;
    if (lhs > 2.0 * diff / (1.0 + vs) + 1e-12) res.failing_seeds.push_back(seed);
  }
  return res;
}

// Uncontaminated instance with r, v ~ U[0,1] used for estimation checks.
inline Instance coverage_instance(std::uint64_t seed, int n, int k, int horizon) {
  Rng rng = make_stream(seed, Stream::kInstance);
  Instance inst{n, k, horizon, {}, {}};
  for (int i = 0; i < n; ++i) {
    inst.revenues.push_back(uniform01(rng));
    inst.utilities.push_back(uniform01(rng));
  }
  return inst;
}

// T_0 = 6250 for N = 8, K = 3, T = 2e5: five full epochs fit.
inline constexpr long kCoverageT0 = 6250;

inline CoverageCounts coverage_run(std::uint64_t seed, int n, int k, int horizon, long t0) {
  const Instance inst = coverage_instance(seed, n, k, horizon);
  RobustOptions o;
  o.eps_bar = 0.0;
  o.t0 = t0;
  o.record_epochs = true;
  ActiveElimination policy(ProblemView::of(inst), o);
  const AdversarySchedule none{0.0, AdversaryKind::kNone, {}, {}};
  run_episode(policy, inst, none, seed);
  return estimation_coverage(inst, policy.state().records(), 0.0);
}

// Per-run coverage of the estimate and revenue bounds at eps = 0; a run
// fails if either rate drops below 99%.
inline SuiteResult estimation_coverage_suite(int runs) {
  SuiteResult res{"estimation-coverage", 0, {}, {}};
  CoverageCounts total;
  for (int s = 0; s < runs; ++s) {
    const auto seed = static_cast<std::uint64_t>(s);
    const CoverageCounts c = coverage_run(seed, 8, 3, 200000, kCoverageT0);
    total += c;
    ++res.cases;
    if (c.estimate_rate() < 0.99 || c.revenue_rate() < 0.99) res.failing_seeds.push_back(seed);
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "estimate %ld/%ld, revenue %ld/%ld", total.estimate_covered,
                total.estimate_pairs, total.revenue_covered, total.revenue_evals);
  res.note = buf;
  return res;
}

// Same config and seed give identical CSV bytes with 1 and 2 workers.
inline SuiteResult determinism(int configs) {
  SuiteResult res{"determinism", 0, {}, {}};
  for (int s = 0; s < configs; ++s) {
    const auto seed = static_cast<std::uint64_t>(s);
    ExperimentConfig c;
    c.n = 10;
    c.k = 3;
    c.t = 1000;
    c.eps = 0.1;
    c.policies = {PolicyKind::kActiveElim, PolicyKind::kAdaptive, PolicyKind::kUcb,
                  PolicyKind::kTs};
    c.trials = 3;
    c.seed = seed * 1000;
    const auto cps = run_trials_checkpoints(c);
    auto csv = [&](unsigned jobs) {
      const ExperimentResult r = run_trials(c, cps, jobs);
      std::ostringstream o;
      write_trace_csv(o, r);
      write_aggregate_csv(o, r);
      return o.str();
    };
    const std::string a = csv(1);
    ++res.cases;
    if (a != csv(1) || a != csv(2)) res.failing_seeds.push_back(seed);
  }
  return res;
}

inline std::vector<std::function<SuiteResult()>> default_suites() {
  return {
      [] { return optimizer_oracle(1000); },
      [] { return choice_invariants(10000); },
      [] { return revenue_perturbation(10000); },
      [] { return estimation_coverage_suite(5); },
      [] { return determinism(3); },
  };
}

}  // namespace rmnl::selftest
