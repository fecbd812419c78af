#pragma once

// Epoch-based UCB and Thompson-sampling baselines for MNL bandits.
//
// Both repeat one assortment until the first no-purchase, which ends the
// epoch. Purchases of item i within an epoch are then a geometric draw with
// mean v_i, so per-epoch purchase counts estimate v_i directly.

#include <algorithm>
#include <cmath>
#include <vector>

#include "rmnl/optimizer.hpp"
#include "rmnl/policy.hpp"

namespace rmnl {

class EpochBaseline : public Policy {
 public:
  explicit EpochBaseline(const ProblemView& problem, double delta = kDefaultDelta)
      : problem_(problem),
        delta_(delta),
        epoch_cap_(std::max(1, problem.horizon)),
        total_purchases_(static_cast<std::size_t>(problem.n_items) + 1, 0),
        epochs_offered_(static_cast<std::size_t>(problem.n_items) + 1, 0),
        tally_(static_cast<std::size_t>(problem.n_items) + 1, 0) {}

  Assortment offer(Rng& rng) override {
    if (need_new_) {
      current_ = choose(rng);
      need_new_ = false;
    }
    return current_;
  }

  // Epochs end at the first no-purchase, or after epoch_cap periods when
  // outliers never walk away.
  void observe(Item purchased) override {
    ++periods_in_epoch_;
    if (purchased != kNoPurchase) ++tally_[static_cast<std::size_t>(purchased)];
    if (purchased == kNoPurchase || periods_in_epoch_ >= epoch_cap_) close_epoch();
  }

  long epochs_completed() const { return epochs_completed_; }
  long epochs_offered(Item i) const { return epochs_offered_[static_cast<std::size_t>(i)]; }
  long total_purchases(Item i) const { return total_purchases_[static_cast<std::size_t>(i)]; }
  const Assortment& current() const { return current_; }

 protected:
  virtual Assortment choose(Rng& rng) = 0;
  // Called once per closed epoch with the per-item purchase tally.
  virtual void on_epoch(const Assortment& offered, const std::vector<long>& tally) = 0;

  Assortment optimize(const std::vector<double>& utilities) const {
    return static_assortment_opt(problem_.revenues, utilities, problem_.capacity, delta_)
        .assortment;
  }

  ProblemView problem_;

 private:
  void close_epoch() {
    for (Item i : current_) {
      ++epochs_offered_[static_cast<std::size_t>(i)];
      total_purchases_[static_cast<std::size_t>(i)] += tally_[static_cast<std::size_t>(i)];
    }
    on_epoch(current_, tally_);
    for (Item i : current_) tally_[static_cast<std::size_t>(i)] = 0;
    ++epochs_completed_;
    periods_in_epoch_ = 0;
    need_new_ = true;
  }

  double delta_;
  int epoch_cap_;
  std::vector<long> total_purchases_;
  std::vector<long> epochs_offered_;
  std::vector<long> tally_;
  Assortment current_;
  bool need_new_ = true;
  long epochs_completed_ = 0;
  int periods_in_epoch_ = 0;
};

struct UcbOptions {
  double c1 = 1.0;      // the cited analysis uses 48
  double margin = 0.0;  // indices are clipped to [0, 1 + margin]
  double delta = kDefaultDelta;
};

class UcbPolicy final : public EpochBaseline {
 public:
  UcbPolicy(const ProblemView& problem, const UcbOptions& opts)
      : EpochBaseline(problem, opts.delta), opts_(opts) {}

  // v̄_i + C1 (sqrt(v̄_i b) + b), b = 48 ln(sqrt(N) l + 1) / T_i, where l is
  // the index of the epoch about to start. Never-offered items get 1.
  double index(Item i) const {
    const long ti = epochs_offered(i);
    if (ti == 0) return 1.0;
    const double mean = static_cast<double>(total_purchases(i)) / static_cast<double>(ti);
    const double l = static_cast<double>(epochs_completed() + 1);
    const double b =
        48.0 * std::log(std::sqrt(static_cast<double>(problem_.n_items)) * l + 1.0) /
        static_cast<double>(ti);
    const double v = mean + opts_.c1 * (std::sqrt(mean * b) + b);
    return std::clamp(v, 0.0, 1.0 + opts_.margin);
  }

 protected:
  Assortment choose(Rng&) override {
    std::vector<double> u(static_cast<std::size_t>(problem_.n_items));
    for (Item i = 1; i <= problem_.n_items; ++i) u[static_cast<std::size_t>(i - 1)] = index(i);
    return optimize(u);
  }
  void on_epoch(const Assortment&, const std::vector<long>&) override {}

 private:
  UcbOptions opts_;
};

// Beta posterior on p_i = 1 / (1 + v_i), the per-period chance a customer
// offered i walks away before buying it. An epoch with m purchases of i is
// m failures followed by one success. Prior Beta(1,1).
class ThompsonPolicy final : public EpochBaseline {
 public:
  explicit ThompsonPolicy(const ProblemView& problem, double delta = kDefaultDelta)
      : EpochBaseline(problem, delta),
        alpha_(static_cast<std::size_t>(problem.n_items) + 1, 1.0),
        beta_(static_cast<std::size_t>(problem.n_items) + 1, 1.0) {}

  double posterior_alpha(Item i) const { return alpha_[static_cast<std::size_t>(i)]; }
  double posterior_beta(Item i) const { return beta_[static_cast<std::size_t>(i)]; }

  // v = 1/p - 1 for p drawn from item i's posterior.
  double sample_utility(Item i, Rng& rng) const {
    const double p = std::max(
        beta_sample(rng, alpha_[static_cast<std::size_t>(i)], beta_[static_cast<std::size_t>(i)]),
        kMinProb);
    return 1.0 / p - 1.0;
  }

 protected:
  Assortment choose(Rng& rng) override {
    std::vector<double> u(static_cast<std::size_t>(problem_.n_items));
    for (Item i = 1; i <= problem_.n_items; ++i)
      u[static_cast<std::size_t>(i - 1)] = sample_utility(i, rng);
    return optimize(u);
  }

  void on_epoch(const Assortment& offered, const std::vector<long>& tally) override {
    for (Item i : offered) {
      alpha_[static_cast<std::size_t>(i)] += 1.0;
      beta_[static_cast<std::size_t>(i)] += static_cast<double>(tally[static_cast<std::size_t>(i)]);
    }
  }

 private:
  static constexpr double kMinProb = 1e-9;
  std::vector<double> alpha_;
  std::vector<double> beta_;
};

}  // namespace rmnl
