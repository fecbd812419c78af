#pragma once

// Epoch-based active elimination over items: the machinery shared by the
// known-contamination policy and each thread of the adaptive policy.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iterator>
#include <vector>

#include "rmnl/choice.hpp"
#include "rmnl/errors.hpp"
#include "rmnl/optimizer.hpp"
#include "rmnl/rng.hpp"

namespace rmnl {

// Raw confidence-width expression (unclamped), in terms of the already
// resolved contamination share eps_tau and log horizon.
inline double width_formula(double eps_tau, double log_horizon, double epoch_length,
                            double n_active, int capacity) {
  const double k = capacity;
  const double nl = n_active * log_horizon;
  const double contamination = eps_tau / 2.0 + std::sqrt(eps_tau * nl / epoch_length) +
                               2.0 * nl / (3.0 * epoch_length);
  return 16.0 * k * (k + 1.0) * contamination + 16.0 * std::sqrt(k * nl / epoch_length);
}

// Revenue-estimation width for the next epoch, clamped to [0,1]. Returns 1
// while the epoch is too short relative to the contamination budget.
inline double compute_width(double eps_bar, double horizon, double epoch_length, int n_active,
                            int capacity) {
  if (epoch_length < eps_bar * horizon / (4.0 * (capacity + 1))) return 1.0;
  const double eps_tau = std::min(1.0, eps_bar * horizon / epoch_length);
  const double log_horizon = std::max(0.0, std::log(horizon));
  const double w = width_formula(eps_tau, log_horizon, epoch_length, n_active, capacity);
  return std::clamp(w, 0.0, 1.0);
}

// v̂_i = min{1, n_i / n_0(i)}; optimistic 1 when no no-purchase was seen.
inline double update_estimate(long purchases, long no_purchases) {
  if (no_purchases <= 0) return 1.0;
  return std::min(1.0, static_cast<double>(purchases) / static_cast<double>(no_purchases));
}

// max(1, round(scale * base)).
inline long scaled_length(double scale, double base) {
  return std::max(1L, std::lround(scale * base));
}

// First-epoch length for the known-contamination policy: 128 (K+1)^2 N ln T.
inline long elimination_t0(int n_items, int capacity, double horizon, double explore_scale) {
  const double k1 = capacity + 1.0;
  return scaled_length(explore_scale, 128.0 * k1 * k1 * n_items * std::log(horizon));
}

// Snapshot of one epoch, kept when recording is enabled.
struct EpochRecord {
  int tau = 0;
  long epoch_length = 0;
  double width = 1.0;  // Δ̂(τ), used for elimination in this epoch
  double gamma = 0.0;
  std::vector<Item> active_before;  // A^(τ)
  std::vector<Item> active_after;   // A^(τ+1)
  std::vector<double> estimates;    // v̂^(τ), all items
  std::vector<Assortment> candidates;        // by item, filled for A^(τ+1)
  std::vector<double> candidate_revenue;     // R(S^(i); v̂^(τ)) by item
  bool completed = false;
  std::vector<double> next_estimates;  // v̂^(τ+1), valid once completed
  std::vector<long> purchases;         // n_i by item
  std::vector<long> no_purchases;      // n_0(i) by item
};

class EliminationCore {
 public:
  struct Params {
    std::vector<double> revenues;
    int capacity = 1;
    double horizon = 1.0;       // T
    double eps_bar = 0.0;
    double sample_share = 1.0;  // width uses share * T and share * T_tau
    long t0 = 1;
    double delta = kDefaultDelta;
    bool record = false;
  };

  explicit EliminationCore(Params p)
      : p_(std::move(p)),
        n_(static_cast<int>(p_.revenues.size())),
        estimates_(p_.revenues.size(), 1.0),
        candidates_(p_.revenues.size() + 1),
        candidate_revenue_(p_.revenues.size() + 1, 0.0),
        purchases_(p_.revenues.size() + 1, 0),
        no_purchases_(p_.revenues.size() + 1, 0) {
    if (!(p_.eps_bar >= 0.0 && p_.eps_bar < 1.0 + 1e-12))
      throw InputError("elimination: eps_bar must lie in [0,1]");
    active_.resize(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) active_[static_cast<std::size_t>(i)] = i + 1;
  }

  // T_tau = 2^tau T_0.
  long epoch_length() const { return p_.t0 << tau_; }
  long t0() const { return p_.t0; }
  int tau() const { return tau_; }
  double width() const { return width_; }
  double gamma() const { return gamma_; }
  double eps_bar() const { return p_.eps_bar; }
  const std::vector<Item>& active() const { return active_; }
  const std::vector<double>& estimates() const { return estimates_; }
  const Assortment& candidate(Item i) const { return candidates_[static_cast<std::size_t>(i)]; }
  long purchases(Item i) const { return purchases_[static_cast<std::size_t>(i)]; }
  long no_purchases(Item i) const { return no_purchases_[static_cast<std::size_t>(i)]; }
  const std::vector<EpochRecord>& records() const { return records_; }

  // A^(τ) <- A^(τ) ∩ other. Returns false if the result is empty.
  bool intersect(const std::vector<Item>& other) {
    std::vector<Item> out;
    std::set_intersection(active_.begin(), active_.end(), other.begin(), other.end(),
                          std::back_inserter(out));
    active_ = std::move(out);
    return !active_.empty();
  }

  // gamma over A^(τ), best assortment containing each active item, then
  // keep i iff R(S^(i)) + 2 Δ̂ >= gamma. Counters are reset.
  void begin_epoch() {
    if (active_.empty()) throw InvariantViolation("elimination: empty active set");
    const std::vector<double> masked = restrict_to(estimates_, active_);
    const OptResult best = static_assortment_opt(p_.revenues, masked, p_.capacity, p_.delta);
    gamma_ = best.estimated_revenue;
    for (Item i : active_) {
      OptResult r = constrained_assortment_opt(p_.revenues, masked, p_.capacity, i, p_.delta);
      candidate_revenue_[static_cast<std::size_t>(i)] = r.estimated_revenue;
      candidates_[static_cast<std::size_t>(i)] = std::move(r.assortment);
      // Both optimizers are delta-accurate lower bounds; using the larger
      // keeps the maximizing item from being dropped by bisection slack.
      gamma_ = std::max(gamma_, r.estimated_revenue);
    }

    std::vector<Item> survivors;
    survivors.reserve(active_.size());
    for (Item i : active_)
      if (candidate_revenue_[static_cast<std::size_t>(i)] + 2.0 * width_ >= gamma_)
        survivors.push_back(i);
    if (survivors.empty()) throw InvariantViolation("elimination removed every item");

    if (p_.record) {
      EpochRecord rec;
      rec.tau = tau_;
      rec.epoch_length = epoch_length();
      rec.width = width_;
      rec.gamma = gamma_;
      rec.active_before = active_;
      rec.active_after = survivors;
      rec.estimates = estimates_;
      rec.candidates.resize(candidates_.size());
      rec.candidate_revenue.assign(candidates_.size(), 0.0);
      for (Item i : survivors) {
        rec.candidates[static_cast<std::size_t>(i)] = candidates_[static_cast<std::size_t>(i)];
        rec.candidate_revenue[static_cast<std::size_t>(i)] =
            candidate_revenue_[static_cast<std::size_t>(i)];
      }
      records_.push_back(std::move(rec));
    }

    for (Item i : active_)
      if (!std::binary_search(survivors.begin(), survivors.end(), i))
        candidates_[static_cast<std::size_t>(i)].clear();
    active_ = std::move(survivors);
    for (Item i : active_) {
      purchases_[static_cast<std::size_t>(i)] = 0;
      no_purchases_[static_cast<std::size_t>(i)] = 0;
    }
  }

  Item sample_item(Rng& rng) const { return active_[uniform_index(rng, active_.size())]; }

  // Only purchases of the sampled item and no-purchases are counted.
  void observe(Item sampled, Item purchased) {
    if (purchased == sampled) ++purchases_[static_cast<std::size_t>(sampled)];
    else if (purchased == kNoPurchase) ++no_purchases_[static_cast<std::size_t>(sampled)];
  }

  // Refresh v̂ on A^(τ+1), compute Δ̂(τ+1), advance τ.
  void end_epoch() {
    for (Item i : active_)
      estimates_[static_cast<std::size_t>(i - 1)] =
          update_estimate(purchases_[static_cast<std::size_t>(i)],
                          no_purchases_[static_cast<std::size_t>(i)]);
    const double len = p_.sample_share * static_cast<double>(epoch_length());
    width_ = compute_width(p_.eps_bar, p_.sample_share * p_.horizon, len,
                           static_cast<int>(active_.size()), p_.capacity);
    if (p_.record && !records_.empty()) {
      EpochRecord& rec = records_.back();
      rec.completed = true;
      rec.next_estimates = estimates_;
      rec.purchases = purchases_;
      rec.no_purchases = no_purchases_;
    }
    ++tau_;
  }

 private:
  Params p_;
  int n_;
  int tau_ = 0;
  double width_ = 1.0;
  double gamma_ = 0.0;
  std::vector<Item> active_;
  std::vector<double> estimates_;  // by item - 1
  std::vector<Assortment> candidates_;
  std::vector<double> candidate_revenue_;
  std::vector<long> purchases_;
  std::vector<long> no_purchases_;
  std::vector<EpochRecord> records_;
};

}  // namespace rmnl
