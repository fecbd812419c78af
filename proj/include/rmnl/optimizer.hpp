#pragma once

// Capacity-constrained MNL assortment optimization.
//
// R(S; v) >= alpha  <=>  sum_{j in S} (r_j - alpha) v_j >= alpha, so for a
// fixed alpha the best S keeps the largest positive psi_j = (r_j - alpha) v_j
// (plus the forced item, if any). Bisection on alpha then finds the optimum
// to within delta.

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rmnl/choice.hpp"
#include "rmnl/errors.hpp"

namespace rmnl {

inline constexpr double kDefaultDelta = 1e-9;

struct OptResult {
  Assortment assortment;
  double estimated_revenue = 0.0;
  double alpha_lo = 0.0;
  double alpha_hi = 1.0;
};

struct Feasibility {
  bool feasible = false;
  Assortment witness;
};

namespace detail {

inline void check_params(std::span<const double> revenues, std::span<const double> utilities,
                         int capacity) {
  if (revenues.size() != utilities.size())
    throw InputError("optimizer: revenue/utility length mismatch");
  if (capacity < 1) throw InputError("optimizer: capacity must be >= 1");
  for (double v : utilities)
    if (!(v >= 0.0)) throw InputError("optimizer: utilities must be nonnegative");
}

inline void check_item(std::optional<Item> must, std::size_t n) {
  if (must && (*must < 1 || static_cast<std::size_t>(*must) > n))
    throw InputError("optimizer: must_include item " + std::to_string(*must) + " out of range");
}

// Reusable scratch space so the bisection loop does not allocate per step.
struct Scratch {
  std::vector<Item> order;
  std::vector<double> psi;
};

inline Feasibility feasibility_unchecked(std::span<const double> revenues,
                                         std::span<const double> utilities, int capacity,
                                         double alpha, std::optional<Item> must,
                                         Scratch& scratch) {
  const std::size_t n = revenues.size();
  scratch.psi.resize(n + 1);
  scratch.order.clear();
  for (std::size_t k = 0; k < n; ++k) {
    const Item j = static_cast<Item>(k + 1);
    const double psi = (revenues[k] - alpha) * utilities[k];
    scratch.psi[k + 1] = psi;
    if (psi > 0.0 && (!must || j != *must)) scratch.order.push_back(j);
  }
  const std::size_t slots = static_cast<std::size_t>(must ? capacity - 1 : capacity);
  const std::size_t take = std::min(slots, scratch.order.size());
  const auto& psi = scratch.psi;
  std::partial_sort(scratch.order.begin(), scratch.order.begin() + static_cast<std::ptrdiff_t>(take),
                    scratch.order.end(), [&psi](Item a, Item b) {
                      const double pa = psi[static_cast<std::size_t>(a)];
                      const double pb = psi[static_cast<std::size_t>(b)];
                      return pa != pb ? pa > pb : a < b;
                    });

  double total = must ? psi[static_cast<std::size_t>(*must)] : 0.0;
  Feasibility out;
  out.witness.reserve(take + 1);
  if (must) out.witness.push_back(*must);
  for (std::size_t k = 0; k < take; ++k) {
    total += psi[static_cast<std::size_t>(scratch.order[k])];
    out.witness.push_back(scratch.order[k]);
  }
  std::sort(out.witness.begin(), out.witness.end());
  out.feasible = total >= alpha;
  return out;
}

inline OptResult bisect(std::span<const double> revenues, std::span<const double> utilities,
                        int capacity, std::optional<Item> must, double delta) {
  if (!(delta > 0.0)) throw InputError("optimizer: delta must be > 0");
  Scratch scratch;
  OptResult res;
  bool found = false;
  double lo = 0.0;
  double hi = 1.0;
  while (hi - lo >= delta) {
    const double mid = 0.5 * (lo + hi);
    Feasibility f = feasibility_unchecked(revenues, utilities, capacity, mid, must, scratch);
    if (f.feasible) {
      res.assortment = std::move(f.witness);
      found = true;
      lo = mid;
    } else {
      hi = mid;
    }
  }
  // Nothing ever reached alpha_mid (e.g. all revenues zero): the forced item
  // alone is still a valid answer; without one, the empty set.
  if (!found) res.assortment = must ? Assortment{*must} : Assortment{};
  res.estimated_revenue = revenue_unchecked(res.assortment, revenues, utilities);
  res.alpha_lo = lo;
  res.alpha_hi = hi;
  return res;
}

}  // namespace detail

// Is there S, |S| <= K (containing must_include if given), with
// sum_{j in S} (r_j - alpha) v_j >= alpha? The witness is must_include plus
// the largest strictly positive psi_j, ties broken by ascending index.
inline Feasibility feasibility_check(std::span<const double> revenues,
                                     std::span<const double> utilities, int capacity,
                                     double alpha, std::optional<Item> must_include = {}) {
  detail::check_params(revenues, utilities, capacity);
  detail::check_item(must_include, revenues.size());
  if (!(alpha > 0.0 && alpha <= 1.0)) throw InputError("feasibility_check: alpha must be in (0,1]");
  detail::Scratch scratch;
  return detail::feasibility_unchecked(revenues, utilities, capacity, alpha, must_include,
                                       scratch);
}

// argmax R(S; v) over |S| <= K with must_include in S, to within delta.
inline OptResult constrained_assortment_opt(std::span<const double> revenues,
                                            std::span<const double> utilities, int capacity,
                                            Item must_include, double delta = kDefaultDelta) {
  detail::check_params(revenues, utilities, capacity);
  detail::check_item(must_include, revenues.size());
  return detail::bisect(revenues, utilities, capacity, must_include, delta);
}

// argmax R(S; v) over |S| <= K, to within delta. May return the empty set.
inline OptResult static_assortment_opt(std::span<const double> revenues,
                                       std::span<const double> utilities, int capacity,
                                       double delta = kDefaultDelta) {
  detail::check_params(revenues, utilities, capacity);
  return detail::bisect(revenues, utilities, capacity, std::nullopt, delta);
}

inline constexpr std::size_t kBruteForceMaxItems = 20;

// Exact optimum by enumerating every subset of size <= K. Test oracle only.
inline OptResult brute_force_opt(std::span<const double> revenues,
                                 std::span<const double> utilities, int capacity,
                                 std::optional<Item> must_include = {}) {
  detail::check_params(revenues, utilities, capacity);
  detail::check_item(must_include, revenues.size());
  const std::size_t n = revenues.size();
  if (n > kBruteForceMaxItems)
    throw InputError("brute_force_opt: refusing to enumerate N=" + std::to_string(n) +
                     " > " + std::to_string(kBruteForceMaxItems));

  OptResult best;
  best.assortment = must_include ? Assortment{*must_include} : Assortment{};
  best.estimated_revenue = revenue_unchecked(best.assortment, revenues, utilities);

  Assortment current = best.assortment;
  const auto limit = static_cast<std::size_t>(capacity);
  // Depth-first over items in increasing order; each node is one subset.
  auto visit = [&](auto&& self, Item next) -> void {
    for (Item j = next; static_cast<std::size_t>(j) <= n; ++j) {
      if (must_include && j == *must_include) continue;
      if (current.size() >= limit) return;
      current.push_back(j);
      const double value = revenue_unchecked(current, revenues, utilities);
      if (value > best.estimated_revenue) {
        best.estimated_revenue = value;
        best.assortment = current;
      }
      self(self, j + 1);
      current.pop_back();
    }
  };
  visit(visit, 1);
  std::sort(best.assortment.begin(), best.assortment.end());
  best.alpha_lo = best.alpha_hi = best.estimated_revenue;
  return best;
}

// Zero the utilities of items outside `active` so the optimizers only ever
// select from the active ground set.
inline std::vector<double> restrict_to(std::span<const double> utilities,
                                       const std::vector<Item>& active) {
  std::vector<double> masked(utilities.size(), 0.0);
  for (Item i : active)
    masked[static_cast<std::size_t>(i - 1)] = utilities[static_cast<std::size_t>(i - 1)];
  return masked;
}

}  // namespace rmnl
