#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "olts/mdp.hpp"

namespace olts {

// Probability/reward grid {0, 1/n, 2/n, ..., 1}.
struct GridSpec {
  int inverse_resolution;  // n >= 1

  explicit GridSpec(int n);
  double epsilon() const { return 1.0 / inverse_resolution; }

  // Coarsens a real accuracy to the grid: n = ceil(1 / eps). Callers that
  // care should record the substitution in their run metadata.
  static GridSpec from_accuracy(double eps);
};

// Grid-backed model: transition rows and deterministic rewards stored as
// integer numerators over n, so counting identities hold bit-exactly. Every
// transition row sums to exactly n.
struct DiscretizedMDP {
  int num_states = 0;
  int num_actions = 0;
  int horizon = 0;
  int grid_n = 1;
  int initial_state = 0;
  std::vector<int> transition_num;  // (s * A + a) * S + s'
  std::vector<int> reward_num;      // s * A + a

  TabularMDP to_tabular() const;
  bool operator==(const DiscretizedMDP&) const = default;
};

namespace grid_detail {

// Compositions of `total` into `parts` non-negative integers, ordered
// lexicographically ((0,...,0,total) first, (total,0,...,0) last).
std::uint64_t composition_count(int total, int parts);
void first_composition(int total, std::span<int> out);
bool next_composition(std::span<int> comp);  // false once exhausted
void unrank_composition(int total, int parts, std::uint64_t rank,
                        std::span<int> out);

}  // namespace grid_detail

// The full family of grid-backed models for given sizes, in one canonical
// order. Supports both streaming (Cursor, the serial reference) and random
// access by index (decode, which is what the parallel net builder uses);
// the two agree element-for-element.
class DiscretizedMdpGrid {
 public:
  DiscretizedMdpGrid(int num_states, int num_actions, int horizon,
                     GridSpec grid, int initial_state = 0);

  // Exact number of grid models:
  //   (n+1)^(S*A) reward tables x C(n+S-1, S-1)^(S*A) transition tables.
  // Throws BudgetExceeded if it does not fit in 64 bits.
  std::uint64_t total_count() const;

  // log10 of the same count, safe at any size.
  double log10_count() const;
  // log10 of the coarse counting bound (n+1)^(S^2*A + S*A).
  double log10_count_bound() const;

  DiscretizedMDP decode(std::uint64_t index) const;

  // Steps a model to its canonical successor in place; false at the end.
  // decode(i) followed by i uses of advance reproduces decode(0..i+i').
  bool advance(DiscretizedMDP& m) const;

  class Cursor {
   public:
    explicit Cursor(const DiscretizedMdpGrid& grid);
    // Copies the current model into `out` and advances; false when done.
    bool next(DiscretizedMDP& out);

   private:
    const DiscretizedMdpGrid* grid_;
    DiscretizedMDP current_;
    bool exhausted_ = false;
  };
  Cursor cursor() const { return Cursor(*this); }

  int num_states() const { return num_states_; }
  int num_actions() const { return num_actions_; }
  int horizon() const { return horizon_; }
  GridSpec grid() const { return grid_; }

 private:
  int num_states_;
  int num_actions_;
  int horizon_;
  GridSpec grid_;
  int initial_state_;
  std::uint64_t compositions_per_row_;
};

// Rounds a model onto the grid, preserving zeros: rewards go to the nearest
// grid point (ties down, clamped to [0, 1] when the expectation falls
// outside); each transition probability is raised to the smallest grid
// point >= p, then the integer surplus is removed by subtracting one grid
// step from the lowest-indexed originally-positive successors. Values within
// 1e-9/n of a grid point are snapped to it so grid-valued inputs are exact
// fixed points. Requires a fixed initial state and finite reward supports.
DiscretizedMDP round_to_grid(const TabularMDP& mdp, GridSpec grid);

// Deduplicated set of optimal policies over a family of grid models.
// Policies are ordered by the first producing model index; per policy the
// first producing index and the number of producing models are retained.
struct PolicyNet {
  int num_states = 0;
  int num_actions = 0;
  int horizon = 0;
  int grid_n = 1;
  std::uint64_t enumerated_count = 0;
  std::vector<NonStationaryPolicy> policies;
  std::vector<std::uint64_t> first_producer;
  std::vector<std::uint64_t> producer_count;

  bool contains(const NonStationaryPolicy& policy) const;
};

struct NetBuildOptions {
  std::uint64_t budget = 10'000'000;  // max grid models to enumerate
  bool parallel = false;
  std::uint64_t chunk = 1 << 14;  // indices per parallel work item
};

// Enumerates every grid model, solves each one exactly, and collects the
// deduplicated optimal policies. Throws BudgetExceeded (with the required
// count) when the family is larger than options.budget.
PolicyNet build_policy_net(int num_states, int num_actions, int horizon,
                           GridSpec grid, const NetBuildOptions& options = {});

// Max over admissible (s, h) of the exact value difference for `policy`
// between `mdp` and its grid rounding.
double perturbation_gap(const TabularMDP& mdp, GridSpec grid,
                        const NonStationaryPolicy& policy);

}  // namespace olts
