#pragma once

// Empirical checks of estimation accuracy and optimum retention, computed
// from recorded elimination epochs against the true instance.

#include <algorithm>
#include <cmath>
#include <vector>

#include "rmnl/choice.hpp"
#include "rmnl/elimination.hpp"
#include "rmnl/simulator.hpp"

namespace rmnl {

struct CoverageCounts {
  long estimate_pairs = 0;    // (epoch, surviving item) pairs
  long estimate_covered = 0;  // |v̂_i - v_i| <= Δ*
  long revenue_evals = 0;     // (epoch, candidate) pairs
  long revenue_covered = 0;   // |R(S; v̂) - R(S; v)| <= Δ̂

  CoverageCounts& operator+=(const CoverageCounts& o) {
    estimate_pairs += o.estimate_pairs;
    estimate_covered += o.estimate_covered;
    revenue_evals += o.revenue_evals;
    revenue_covered += o.revenue_covered;
    return *this;
  }
  double estimate_rate() const {
    return estimate_pairs ? static_cast<double>(estimate_covered) / estimate_pairs : 1.0;
  }
  double revenue_rate() const {
    return revenue_evals ? static_cast<double>(revenue_covered) / revenue_evals : 1.0;
  }
};

// Estimates refreshed at the end of each completed epoch are compared with
// Δ*(K, eps, T, T_tau, N_tau, V_S, v_i), where S is the candidate offered
// for i during that epoch. Each epoch's candidates are compared under the
// estimates that produced them with that epoch's width.
inline CoverageCounts estimation_coverage(const Instance& inst,
                                          const std::vector<EpochRecord>& records,
                                          double eps) {
  CoverageCounts c;
  const auto& v = inst.utilities;
  for (const EpochRecord& rec : records) {
    for (Item i : rec.active_after) {
      const Assortment& s = rec.candidates[static_cast<std::size_t>(i)];
      const double rev_err = std::abs(revenue_unchecked(s, inst.revenues, rec.estimates) -
                                      revenue_unchecked(s, inst.revenues, v));
      ++c.revenue_evals;
      c.revenue_covered += rev_err <= rec.width;

      if (!rec.completed) continue;
      double v_sum = 0.0;
      for (Item j : s) v_sum += v[static_cast<std::size_t>(j - 1)];
      const double vi = v[static_cast<std::size_t>(i - 1)];
      const double bound = delta_star_diagnostic(
          inst.capacity, eps, inst.horizon, static_cast<double>(rec.epoch_length),
          static_cast<double>(rec.active_after.size()), v_sum, vi);
      ++c.estimate_pairs;
      c.estimate_covered += std::abs(rec.next_estimates[static_cast<std::size_t>(i - 1)] - vi) <= bound;
    }
  }
  return c;
}

// True if every item of `optimum` is active at the start of every recorded
// epoch and after its elimination step.
inline bool retains_optimum(const std::vector<EpochRecord>& records, const Assortment& optimum) {
  for (const EpochRecord& rec : records)
    for (Item i : optimum)
      if (!std::binary_search(rec.active_before.begin(), rec.active_before.end(), i) ||
          !std::binary_search(rec.active_after.begin(), rec.active_after.end(), i))
        return false;
  return true;
}

}  // namespace rmnl
