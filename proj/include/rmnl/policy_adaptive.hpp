#pragma once

// Active elimination for an unknown contamination level.
//
// J elimination threads run side by side on the grid eps_j = 2^-j. Each
// period one thread is drawn with probability p_j = 2^-(J-j) / (1 - 2^-J),
// so finer (smaller eps) threads serve most customers. Active sets are kept
// nested (finer thread ⊆ coarser thread). If a finer thread's candidate looks
// clearly suboptimal under a coarser thread's estimates, the finest grid
// value is too small and the whole policy restarts with J - 1 threads.

#include <cmath>
#include <optional>
#include <vector>

#include "rmnl/elimination.hpp"
#include "rmnl/policy.hpp"

namespace rmnl {

struct EpsGrid {
  int levels = 1;              // J
  std::vector<double> eps;     // eps_j = 2^-j
  std::vector<double> probs;   // p_j
};

inline EpsGrid make_grid(int levels) {
  if (levels < 1) throw InputError("eps grid: J must be >= 1");
  EpsGrid g;
  g.levels = levels;
  const double norm = 1.0 - std::ldexp(1.0, -levels);
  for (int j = 0; j < levels; ++j) {
    g.eps.push_back(std::ldexp(1.0, -j));
    g.probs.push_back(std::ldexp(1.0, -(levels - j)) / norm);
  }
  return g;
}

// J = max(1, ceil(log2 sqrt(T/N))), so the finest value 2^-(J-1) sits near
// sqrt(N/T).
inline EpsGrid init_grid(int n_items, int horizon) {
  if (n_items < 1) throw InputError("eps grid: N must be >= 1");
  if (n_items > horizon) throw InputError("eps grid: requires N <= T");
  const double x = 0.5 * std::log2(static_cast<double>(horizon) / n_items);
  const int levels = std::max(1, static_cast<int>(std::ceil(x - 1e-12)));
  return make_grid(levels);
}

// First-epoch length: 64 (K+1)^2 ln T (no N factor).
inline long adaptive_t0(int capacity, double horizon, double explore_scale) {
  const double k1 = capacity + 1.0;
  return scaled_length(explore_scale, 64.0 * k1 * k1 * std::log(horizon));
}

struct AdaptiveOptions {
  double explore_scale = 1.0;
  std::optional<long> t0;
  // Overrides the grid size derived from (N, T).
  std::optional<int> levels;
  double delta = kDefaultDelta;
  bool record_epochs = false;
};

class AdaptiveElimination final : public Policy {
 public:
  struct Selection {
    int thread = 0;
    Item item = kNoPurchase;
    bool restart = false;
  };

  AdaptiveElimination(const ProblemView& problem, const AdaptiveOptions& opts)
      : problem_(problem), opts_(opts) {
    const EpsGrid g = opts.levels ? make_grid(*opts.levels)
                                  : init_grid(problem.n_items, problem.horizon);
    initial_levels_ = g.levels;
    t0_ = opts.t0 ? std::max(1L, *opts.t0)
                  : adaptive_t0(problem.capacity, problem.horizon, opts.explore_scale);
    build(g);
  }

  Assortment offer(Rng& rng) override {
    if (remaining_ == 0) start_epoch();
    for (;;) {
      last_ = adaptive_select(rng);
      if (!last_.restart || grid_.levels == 1) break;
      restart();
    }
    return threads_[static_cast<std::size_t>(last_.thread)].candidate(last_.item);
  }

  void observe(Item purchased) override {
    threads_[static_cast<std::size_t>(last_.thread)].observe(last_.item, purchased);
    if (--remaining_ == 0) end_epoch();
  }

  // Intersect each thread with its coarser neighbour's post-elimination set,
  // then run that thread's elimination step, for j = 0..J-1 in order. An
  // empty intersection is handled like a failed consistency check.
  void start_epoch() {
    for (std::size_t j = 0; j < threads_.size(); ++j) {
      if (j > 0 && !threads_[j].intersect(threads_[j - 1].active())) {
        if (grid_.levels > 1) {
          restart();
          return;
        }
      }
      threads_[j].begin_epoch();
    }
    remaining_ = threads_.front().epoch_length();
    for (auto& row : check_cache_) std::fill(row.begin(), row.end(), kUnknown);
  }

  // Draw thread j ~ p and item i uniformly from thread j's active set, and
  // test the candidate against every coarser thread k < j:
  // R(S_j^(i); v̂^k) < gamma_k - 7 Δ̂_k.
  Selection adaptive_select(Rng& rng) {
    Selection s;
    if (grid_.levels > 1) {
      const double u = uniform01(rng);
      double acc = 0.0;
      s.thread = grid_.levels - 1;
      for (int j = 0; j < grid_.levels; ++j) {
        acc += grid_.probs[static_cast<std::size_t>(j)];
        if (u < acc) {
          s.thread = j;
          break;
        }
      }
    }
    s.item = threads_[static_cast<std::size_t>(s.thread)].sample_item(rng);
    s.restart = inconsistent(s.thread, s.item);
    return s;
  }

  // Discard all thread state and rebuild with J - 1 levels. The remaining
  // horizon continues from the current period. No-op at J = 1.
  void restart() {
    if (grid_.levels <= 1) return;
    ++restart_count_;
    build(make_grid(grid_.levels - 1));
    start_epoch();
  }

  void end_epoch() {
    for (auto& t : threads_) t.end_epoch();
    remaining_ = 0;
  }

  int levels() const { return grid_.levels; }
  int initial_levels() const { return initial_levels_; }
  int restart_count() const { return restart_count_; }
  long t0() const { return t0_; }
  const EpsGrid& grid() const { return grid_; }
  const std::vector<EliminationCore>& threads() const { return threads_; }
  // Mutable access for tests that stage thread state directly.
  std::vector<EliminationCore>& threads_mut() { return threads_; }

 private:
  static constexpr signed char kUnknown = -1;

  void build(const EpsGrid& g) {
    grid_ = g;
    threads_.clear();
    for (int j = 0; j < g.levels; ++j) {
      EliminationCore::Params p;
      p.revenues = problem_.revenues;
      p.capacity = problem_.capacity;
      p.horizon = problem_.horizon;
      p.eps_bar = g.eps[static_cast<std::size_t>(j)];
      p.sample_share = g.probs[static_cast<std::size_t>(j)];
      p.t0 = t0_;
      p.delta = opts_.delta;
      p.record = opts_.record_epochs;
      threads_.emplace_back(std::move(p));
    }
    check_cache_.assign(static_cast<std::size_t>(g.levels),
                        std::vector<signed char>(static_cast<std::size_t>(problem_.n_items) + 1,
                                                 kUnknown));
    remaining_ = 0;
  }

  // Estimates are frozen within an epoch, so each (j, i) is evaluated once.
  bool inconsistent(int j, Item i) {
    signed char& cached = check_cache_[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
    if (cached != kUnknown) return cached != 0;
    const Assortment& cand = threads_[static_cast<std::size_t>(j)].candidate(i);
    bool bad = false;
    for (int k = 0; k < j && !bad; ++k) {
      const EliminationCore& coarse = threads_[static_cast<std::size_t>(k)];
      const double value = revenue_unchecked(cand, problem_.revenues, coarse.estimates());
      bad = value < coarse.gamma() - 7.0 * coarse.width();
    }
    cached = bad ? 1 : 0;
    return bad;
  }

  ProblemView problem_;
  AdaptiveOptions opts_;
  EpsGrid grid_;
  int initial_levels_ = 1;
  int restart_count_ = 0;
  long t0_ = 1;
  long remaining_ = 0;
  std::vector<EliminationCore> threads_;
  std::vector<std::vector<signed char>> check_cache_;
  Selection last_;
};

}  // namespace rmnl
