#pragma once

// Protocol loop, regret accounting and experiment instances.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rmnl/choice.hpp"
#include "rmnl/errors.hpp"
#include "rmnl/optimizer.hpp"
#include "rmnl/policy.hpp"
#include "rmnl/rng.hpp"

namespace rmnl {

struct GeneratedInstance {
  Instance instance;
  std::vector<double> outlier_utilities;
};

// Items 1..K: r = 1, v = 0 (lucrative but never bought by typical
// customers). Items K+1..N: r, v ~ U[0.1, 0.2]. Outliers use v' = 1 on the
// zero-utility items and v' = v elsewhere.
inline GeneratedInstance generate_benchmark_instance(int n_items, int capacity, int horizon,
                                                 Rng& rng) {
  if (capacity < 1 || capacity >= n_items)
    throw InputError("benchmark instance: requires 1 <= K < N");
  GeneratedInstance g;
  Instance& inst = g.instance;
  inst.n_items = n_items;
  inst.capacity = capacity;
  inst.horizon = horizon;
  inst.revenues.resize(static_cast<std::size_t>(n_items));
  inst.utilities.resize(static_cast<std::size_t>(n_items));
  for (int k = 0; k < n_items; ++k) {
    const auto idx = static_cast<std::size_t>(k);
    if (k < capacity) {
      inst.revenues[idx] = 1.0;
      inst.utilities[idx] = 0.0;
    } else {
      inst.revenues[idx] = uniform(rng, 0.1, 0.2);
      inst.utilities[idx] = uniform(rng, 0.1, 0.2);
    }
  }
  inst.validate();
  g.outlier_utilities = inst.utilities;
  for (auto& v : g.outlier_utilities)
    if (v == 0.0) v = 1.0;
  return g;
}

struct Optimum {
  Assortment assortment;
  double revenue = 0.0;
};

// S* for typical customers. Brute force is authoritative up to 20 items and
// cross-checks the bisection optimizer; beyond that bisection is used alone.
inline Optimum true_optimum(const Instance& inst) {
  OptResult fast = static_assortment_opt(inst.revenues, inst.utilities, inst.capacity);
  if (inst.revenues.size() <= kBruteForceMaxItems) {
    OptResult exact = brute_force_opt(inst.revenues, inst.utilities, inst.capacity);
    if (std::abs(exact.estimated_revenue - fast.estimated_revenue) > 1e-6)
      throw InvariantViolation("optimizer disagrees with brute force on true instance");
    return {std::move(exact.assortment), exact.estimated_revenue};
  }
  return {std::move(fast.assortment), fast.estimated_revenue};
}

struct RegretTrace {
  std::string policy;
  int trial = 0;
  std::uint64_t seed = 0;
  std::vector<double> instantaneous;  // R(S*) - R(S_t), t = 1..T
  std::vector<double> cumulative;
  std::size_t outlier_periods = 0;

  double average(std::size_t t) const {
    return t == 0 ? 0.0 : cumulative[t - 1] / static_cast<double>(t);
  }
};

struct EpisodeStreams {
  Rng adversary;
  Rng policy;
  Rng customer;

  static EpisodeStreams from_seed(std::uint64_t seed) {
    return {make_stream(seed, Stream::kAdversary), make_stream(seed, Stream::kPolicy),
            make_stream(seed, Stream::kCustomer)};
  }
};

// One episode of the protocol: the adversary commits (phi_t, Q_t) from
// F_{t-1}, the policy offers S_t from G_{t-1}, the customer chooses, and
// expected-revenue regret against S* is accumulated.
inline RegretTrace run_episode(Policy& policy, const Instance& inst,
                               const AdversarySchedule& schedule, EpisodeStreams& streams,
                               History* history_out = nullptr) {
  inst.validate();
  const Optimum opt = true_optimum(inst);
  Adversary adversary(schedule, inst.horizon);
  History history(inst.n_items);
  RegretTrace trace;
  trace.instantaneous.reserve(static_cast<std::size_t>(inst.horizon));
  trace.cumulative.reserve(static_cast<std::size_t>(inst.horizon));

  double cum = 0.0;
  for (int t = 1; t <= inst.horizon; ++t) {
    const Commitment c = adversary.commit(history, t);
    Assortment s = policy.offer(streams.policy);
    if (s.size() > static_cast<std::size_t>(inst.capacity))
      throw ProtocolViolation("policy offered " + std::to_string(s.size()) +
                              " items with capacity " + std::to_string(inst.capacity));
    try {
      validate_assortment(s, static_cast<std::size_t>(inst.n_items));
    } catch (const InputError& e) {
      throw ProtocolViolation(std::string("policy offered invalid assortment: ") + e.what());
    }
    const Item choice = Adversary::realize(c, s, inst.utilities, streams.customer);
    policy.observe(choice);

    const double regret = opt.revenue - revenue_unchecked(s, inst.revenues, inst.utilities);
    if (regret < -1e-12) throw InvariantViolation("negative regret: S* is not optimal");
    cum += regret;
    trace.instantaneous.push_back(regret);
    trace.cumulative.push_back(cum);
    history.append({c.is_outlier, c.model, std::move(s), choice});
  }
  trace.outlier_periods = history.outlier_count();
  if (history_out) *history_out = std::move(history);
  return trace;
}

inline RegretTrace run_episode(Policy& policy, const Instance& inst,
                               const AdversarySchedule& schedule, std::uint64_t seed) {
  EpisodeStreams streams = EpisodeStreams::from_seed(seed);
  RegretTrace trace = run_episode(policy, inst, schedule, streams);
  trace.seed = seed;
  return trace;
}

// Estimation-error bound for v̂_i at the end of an epoch:
// 8(K+1)(e/2 + sqrt(e N ln T / T_tau) + 2 N ln T / (3 T_tau))
//   + 8 sqrt((1 + V_S) v_i N ln T / T_tau),  e = min(1, eps T / T_tau).
inline double delta_star_diagnostic(int capacity, double eps, double horizon,
                                    double epoch_length, double n_active, double v_sum,
                                    double v_item) {
  const double e = std::min(1.0, eps * horizon / epoch_length);
  const double nl = n_active * std::max(0.0, std::log(horizon));
  return 8.0 * (capacity + 1.0) *
             (e / 2.0 + std::sqrt(e * nl / epoch_length) + 2.0 * nl / (3.0 * epoch_length)) +
         8.0 * std::sqrt((1.0 + v_sum) * v_item * nl / epoch_length);
}

// {T/4, T/2, 3T/4, T}, deduplicated, at least 1.
inline std::vector<int> default_checkpoints(int horizon) {
  std::vector<int> out;
  for (int q = 1; q <= 4; ++q) out.push_back(std::max(1, horizon * q / 4));
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// `count` evenly spaced periods ending at T.
inline std::vector<int> grid_checkpoints(int horizon, int count) {
  std::vector<int> out;
  for (int k = 1; k <= count; ++k)
    out.push_back(std::max(1, static_cast<int>(
                                  (static_cast<long long>(horizon) * k + count / 2) / count)));
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

struct CheckpointStats {
  int t = 0;
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation, 0 for a single trial
  int trials = 0;
};

// Mean/sd across trials of average regret at each checkpoint.
// values[trial][c] is the average regret of `trial` at checkpoint c.
inline std::vector<CheckpointStats> aggregate(const std::vector<int>& checkpoints,
                                              const std::vector<std::vector<double>>& values) {
  std::vector<CheckpointStats> out;
  const auto n = static_cast<double>(values.size());
  for (std::size_t c = 0; c < checkpoints.size(); ++c) {
    CheckpointStats s;
    s.t = checkpoints[c];
    s.trials = static_cast<int>(values.size());
    double sum = 0.0;
    for (const auto& row : values) sum += row[c];
    s.mean = values.empty() ? 0.0 : sum / n;
    if (values.size() > 1) {
      double ss = 0.0;
      for (const auto& row : values) ss += (row[c] - s.mean) * (row[c] - s.mean);
      s.sd = std::sqrt(ss / (n - 1.0));
    }
    out.push_back(s);
  }
  return out;
}

}  // namespace rmnl
