#pragma once

// Active-elimination policy for a known contamination bound eps_bar.
//
// Epoch tau lasts T_tau = 2^tau T_0 periods. At its start the policy
// computes, from the previous epoch's estimates, the best assortment S^(i)
// containing each active item i and drops items whose S^(i) trails the best
// revenue by more than twice the current width. Each period it offers S^(i)
// for an item i drawn uniformly from the survivors.

#include <optional>

#include "rmnl/elimination.hpp"
#include "rmnl/policy.hpp"

namespace rmnl {

struct RobustOptions {
  double eps_bar = 0.0;
  double explore_scale = 1.0;
  // Overrides the T_0 formula when set.
  std::optional<long> t0;
  double delta = kDefaultDelta;
  bool record_epochs = false;
};

class ActiveElimination final : public Policy {
 public:
  ActiveElimination(const ProblemView& problem, const RobustOptions& opts)
      : core_(make_params(problem, opts)) {}

  Assortment offer(Rng& rng) override {
    if (remaining_ == 0) begin_epoch();
    sampled_ = select_item(rng);
    return core_.candidate(sampled_);
  }

  void observe(Item purchased) override {
    core_.observe(sampled_, purchased);
    if (--remaining_ == 0) core_.end_epoch();
  }

  // Step-level API.
  void begin_epoch() {
    core_.begin_epoch();
    remaining_ = core_.epoch_length();
  }
  Item select_item(Rng& rng) const { return core_.sample_item(rng); }
  Assortment select_assortment(Rng& rng) {
    sampled_ = select_item(rng);
    return core_.candidate(sampled_);
  }

  long t0() const { return core_.t0(); }
  const EliminationCore& state() const { return core_; }

 private:
  static EliminationCore::Params make_params(const ProblemView& problem,
                                             const RobustOptions& opts) {
    if (!(opts.eps_bar >= 0.0 && opts.eps_bar <= 1.0))
      throw InputError("active elimination: eps_bar must lie in [0,1]");
    EliminationCore::Params p;
    p.revenues = problem.revenues;
    p.capacity = problem.capacity;
    p.horizon = problem.horizon;
    p.eps_bar = opts.eps_bar;
    p.t0 = opts.t0 ? std::max(1L, *opts.t0)
                   : elimination_t0(problem.n_items, problem.capacity, problem.horizon,
                                    opts.explore_scale);
    p.delta = opts.delta;
    p.record = opts.record_epochs;
    return p;
  }

  EliminationCore core_;
  long remaining_ = 0;
  Item sampled_ = kNoPurchase;
};

}  // namespace rmnl
