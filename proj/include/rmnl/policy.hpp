#pragma once

#include <string>
#include <vector>

#include "rmnl/choice.hpp"
#include "rmnl/rng.hpp"

namespace rmnl {

// What a policy is allowed to know about the problem: everything except the
// typical customers' utilities.
struct ProblemView {
  int n_items = 0;
  int capacity = 0;
  int horizon = 0;
  std::vector<double> revenues;

  static ProblemView of(const Instance& inst) {
    return {inst.n_items, inst.capacity, inst.horizon, inst.revenues};
  }
};

// An admissible policy: S_t depends only on past (S, i) pairs, delivered
// through observe(), plus the policy's own randomness.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual Assortment offer(Rng& rng) = 0;
  // Outcome of the most recent offer (0 = no purchase).
  virtual void observe(Item purchased) = 0;
};

}  // namespace rmnl
