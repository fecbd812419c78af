#pragma once

// Ground-truth MNL choice model, the customer protocol, and adversaries.
//
// Items are 1-based; index 0 always denotes the no-purchase outcome, whose
// MNL weight is fixed at 1.

#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rmnl/errors.hpp"
#include "rmnl/rng.hpp"

namespace rmnl {

using Item = int;
inline constexpr Item kNoPurchase = 0;

// Ordered set of distinct 1-based items.
using Assortment = std::vector<Item>;

struct Instance {
  int n_items = 0;
  int capacity = 0;
  int horizon = 0;
  std::vector<double> revenues;   // r_i in [0,1], index i-1
  std::vector<double> utilities;  // v_i in [0,1], index i-1

  double revenue(Item i) const { return revenues[static_cast<std::size_t>(i - 1)]; }
  double utility(Item i) const { return utilities[static_cast<std::size_t>(i - 1)]; }

  void validate() const {
    if (n_items < 1) throw InputError("instance: n_items must be >= 1");
    if (capacity < 1 || capacity > n_items)
      throw InputError("instance: capacity must satisfy 1 <= K <= N");
    if (horizon < 1) throw InputError("instance: horizon must be >= 1");
    if (revenues.size() != static_cast<std::size_t>(n_items) ||
        utilities.size() != static_cast<std::size_t>(n_items))
      throw InputError("instance: parameter vectors must have length N");
    for (int i = 0; i < n_items; ++i) {
      const double r = revenues[static_cast<std::size_t>(i)];
      const double v = utilities[static_cast<std::size_t>(i)];
      if (!(r >= 0.0 && r <= 1.0)) throw InputError("instance: revenue outside [0,1]");
      if (!(v >= 0.0 && v <= 1.0)) throw InputError("instance: utility outside [0,1]");
    }
  }
};

// Throws InputError unless every item of S is in 1..n and appears once.
inline void validate_assortment(const Assortment& s, std::size_t n) {
  std::vector<bool> seen(n + 1, false);
  for (Item i : s) {
    if (i < 1 || static_cast<std::size_t>(i) > n)
      throw InputError("assortment item " + std::to_string(i) + " out of range 1.." +
                       std::to_string(n));
    if (seen[static_cast<std::size_t>(i)])
      throw InputError("assortment item " + std::to_string(i) + " repeated");
    seen[static_cast<std::size_t>(i)] = true;
  }
}

// Distribution over S ∪ {0}: probs[0] is no-purchase, probs[k+1] belongs to
// assortment[k].
struct ChoiceDistribution {
  Assortment assortment;
  std::vector<double> probs;

  double prob_of(Item i) const {
    if (i == kNoPurchase) return probs[0];
    for (std::size_t k = 0; k < assortment.size(); ++k)
      if (assortment[k] == i) return probs[k + 1];
    return 0.0;
  }
};

// P(i) = v_i / (1 + sum_{j in S} v_j), P(0) = 1 / (1 + sum_{j in S} v_j).
inline ChoiceDistribution choice_probabilities(const Assortment& s,
                                               std::span<const double> utilities) {
  validate_assortment(s, utilities.size());
  double denom = 1.0;
  for (Item i : s) denom += utilities[static_cast<std::size_t>(i - 1)];
  ChoiceDistribution d{s, {}};
  d.probs.reserve(s.size() + 1);
  d.probs.push_back(1.0 / denom);
  for (Item i : s) d.probs.push_back(utilities[static_cast<std::size_t>(i - 1)] / denom);
  return d;
}

// R(S) = sum r_i v_i / (1 + sum v_i); R(empty) = 0. No validation, for hot loops.
inline double revenue_unchecked(const Assortment& s, std::span<const double> revenues,
                                std::span<const double> utilities) {
  double num = 0.0;
  double denom = 1.0;
  for (Item i : s) {
    const auto k = static_cast<std::size_t>(i - 1);
    num += revenues[k] * utilities[k];
    denom += utilities[k];
  }
  return num / denom;
}

inline double expected_revenue(const Assortment& s, std::span<const double> revenues,
                               std::span<const double> utilities) {
  if (revenues.size() != utilities.size())
    throw InputError("expected_revenue: revenue/utility length mismatch");
  validate_assortment(s, utilities.size());
  return revenue_unchecked(s, revenues, utilities);
}

// Inverse-CDF draw; one uniform per call.
inline Item sample_choice(const ChoiceDistribution& dist, Rng& rng) {
  const double u = uniform01(rng);
  double acc = 0.0;
  for (std::size_t k = 0; k < dist.probs.size(); ++k) {
    acc += dist.probs[k];
    if (u < acc) return k == 0 ? kNoPurchase : dist.assortment[k - 1];
  }
  // Rounding left u above the final partial sum: return the last outcome
  // with positive mass.
  for (std::size_t k = dist.probs.size(); k-- > 0;)
    if (dist.probs[k] > 0.0) return k == 0 ? kNoPurchase : dist.assortment[k - 1];
  return kNoPurchase;
}

// ---------------------------------------------------------------------------
// Adversary protocol

// An outlier choice model Q_t: MNL weights over all N items (no-purchase
// weight 1). Shared so history records stay cheap.
using OutlierModel = std::shared_ptr<const std::vector<double>>;

struct PeriodRecord {
  bool is_outlier = false;
  OutlierModel outlier_model;  // null when typical
  Assortment offered;
  Item choice = kNoPurchase;
};

// Full record F_{t-1}. Policies only ever see (offered, choice) pairs, which
// the simulator forwards through Policy::observe.
class History {
 public:
  explicit History(int n_items) : purchases_(static_cast<std::size_t>(n_items) + 1, 0) {}

  void append(PeriodRecord rec) {
    if (rec.is_outlier) ++outliers_;
    ++purchases_[static_cast<std::size_t>(rec.choice)];
    records_.push_back(std::move(rec));
  }

  const std::vector<PeriodRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  std::size_t outlier_count() const { return outliers_; }
  // Index 0 counts no-purchases.
  const std::vector<long>& purchase_counts() const { return purchases_; }

 private:
  std::vector<PeriodRecord> records_;
  std::vector<long> purchases_;
  std::size_t outliers_ = 0;
};

enum class AdversaryKind { kNone, kFrontLoaded, kAdaptiveHook };

// Decision hook for adaptive adversaries: given F_{t-1}, the (1-based)
// period t and the remaining budget, return an outlier model to make customer
// t an outlier, or nullopt for a typical customer.
using AdversaryHook = std::function<std::optional<OutlierModel>(
    const History&, int t, std::size_t budget_left)>;

struct AdversarySchedule {
  double epsilon = 0.0;
  AdversaryKind kind = AdversaryKind::kNone;
  std::vector<double> outlier_utilities;  // front-loaded Q weights
  AdversaryHook hook;                     // adaptive_hook only
};

// floor(eps * T), robust to representation error such as 0.29 * 100.
inline std::size_t outlier_budget(double epsilon, int horizon) {
  return static_cast<std::size_t>(std::floor(epsilon * horizon + 1e-9));
}

struct Commitment {
  bool is_outlier = false;
  OutlierModel model;
};

class Adversary {
 public:
  Adversary(AdversarySchedule schedule, int horizon)
      : schedule_(std::move(schedule)),
        horizon_(horizon),
        budget_(outlier_budget(schedule_.epsilon, horizon)) {
    if (!(schedule_.epsilon >= 0.0 && schedule_.epsilon < 1.0))
      throw InputError("adversary: epsilon must lie in [0,1)");
    if (schedule_.kind == AdversaryKind::kFrontLoaded)
      front_model_ = std::make_shared<const std::vector<double>>(schedule_.outlier_utilities);
    if (schedule_.kind == AdversaryKind::kAdaptiveHook && !schedule_.hook)
      throw InputError("adversary: adaptive_hook requires a hook");
  }

  // Decide (phi_t, Q_t) from F_{t-1} only; must run before S_t exists.
  Commitment commit(const History& history, int t) {
    if (t < 1 || t > horizon_) throw InputError("adversary: period out of range");
    Commitment c;
    switch (schedule_.kind) {
      case AdversaryKind::kNone:
        break;
      case AdversaryKind::kFrontLoaded:
        if (static_cast<std::size_t>(t) <= budget_) c = {true, front_model_};
        break;
      case AdversaryKind::kAdaptiveHook:
        if (auto q = schedule_.hook(history, t, budget_ - used_)) c = {true, std::move(*q)};
        break;
    }
    if (c.is_outlier) {
      if (used_ >= budget_) throw InvariantViolation("adversary exceeded outlier budget");
      ++used_;
    }
    return c;
  }

  // Realize i_t once S_t is revealed.
  static Item realize(const Commitment& c, const Assortment& offered,
                      std::span<const double> typical_utilities, Rng& rng) {
    const std::span<const double> weights =
        c.is_outlier ? std::span<const double>(*c.model) : typical_utilities;
    return sample_choice(choice_probabilities(offered, weights), rng);
  }

  struct Step {
    bool is_outlier;
    Item choice;
  };

  // commit + realize in protocol order.
  Step step(const History& history, int t, const Assortment& offered,
            std::span<const double> typical_utilities, Rng& rng) {
    const Commitment c = commit(history, t);
    return {c.is_outlier, realize(c, offered, typical_utilities, rng)};
  }

  std::size_t budget() const { return budget_; }
  std::size_t used() const { return used_; }

 private:
  AdversarySchedule schedule_;
  int horizon_;
  std::size_t budget_;
  std::size_t used_ = 0;
  OutlierModel front_model_;
};

// Adaptive adversary: spreads floor(eps*T) outliers evenly over the horizon
// and, on each outlier period, refuses the item with the highest empirical
// purchase count so far while buying anything else offered with weight 1.
inline AdversaryHook make_demote_leader_hook(double epsilon, int n_items) {
  return [epsilon, n_items](const History& h, int t,
                            std::size_t budget_left) -> std::optional<OutlierModel> {
    if (budget_left == 0) return std::nullopt;
    if (outlier_budget(epsilon, t) == outlier_budget(epsilon, t - 1)) return std::nullopt;
    const auto& counts = h.purchase_counts();
    Item leader = 1;
    for (Item i = 2; i <= n_items; ++i)
      if (counts[static_cast<std::size_t>(i)] > counts[static_cast<std::size_t>(leader)]) leader = i;
    auto w = std::make_shared<std::vector<double>>(static_cast<std::size_t>(n_items), 1.0);
    (*w)[static_cast<std::size_t>(leader - 1)] = 0.0;
    return OutlierModel(std::move(w));
  };
}

}  // namespace rmnl
