#pragma once

#include <span>
#include <string>
#include <vector>

#include "olts/rng.hpp"

namespace olts {

// Absolute tolerance for probability-vector sums in double-backed models.
// Grid-backed models (see policy_net.hpp) are exact and never need it.
inline constexpr double kProbSumTolerance = 1e-9;

// Per-episode cumulative reward must not exceed 1; checked path-wise at
// sampling time with this slack.
inline constexpr double kCumulativeRewardTolerance = 1e-9;

// Finite discrete reward distribution. The one-point case is a
// deterministic reward.
struct RewardDistribution {
  std::vector<double> support;
  std::vector<double> probability;

  static RewardDistribution point(double value) { return {{value}, {1.0}}; }

  double mean() const {
    double m = 0.0;
    for (std::size_t i = 0; i < support.size(); ++i)
      m += support[i] * probability[i];
    return m;
  }

  // One-point distributions consume no randomness.
  double sample(SplitRng& rng) const;
};

// Samples an index from a probability vector by inverse CDF. Entries must be
// non-negative and sum to ~1; the last positive entry absorbs round-off.
int sample_categorical(std::span<const double> probs, SplitRng& rng);

// Finite state/action episodic model. States, actions and steps are
// 0-based throughout. The initial state is either fixed or a distribution
// over states; most algorithms require the fixed form (see
// reduce_initial_distribution).
class TabularMDP {
 public:
  TabularMDP(int num_states, int num_actions, int horizon);

  int num_states() const { return num_states_; }
  int num_actions() const { return num_actions_; }
  int horizon() const { return horizon_; }

  std::span<const double> transition_row(int s, int a) const {
    return {transitions_.data() +
                static_cast<std::size_t>(s * num_actions_ + a) * num_states_,
            static_cast<std::size_t>(num_states_)};
  }
  void set_transition_row(int s, int a, std::span<const double> row);
  void set_transition(int s, int a, int next, double p) {
    transitions_[static_cast<std::size_t>(s * num_actions_ + a) * num_states_ +
                 next] = p;
  }

  const RewardDistribution& reward(int s, int a) const {
    return rewards_[s * num_actions_ + a];
  }
  void set_reward(int s, int a, RewardDistribution r) {
    rewards_[s * num_actions_ + a] = std::move(r);
  }

  bool has_fixed_initial() const { return initial_state_ >= 0; }
  int initial_state() const;                          // requires fixed form
  std::span<const double> initial_distribution() const;  // requires dist form
  void set_fixed_initial(int s);
  void set_initial_distribution(std::vector<double> mu);

 private:
  int num_states_;
  int num_actions_;
  int horizon_;
  std::vector<double> transitions_;  // (s * A + a) * S + s'
  std::vector<RewardDistribution> rewards_;
  int initial_state_ = -1;
  std::vector<double> initial_dist_;
};

// Returns every invariant violation found (empty means valid): row sums
// within kProbSumTolerance of 1, non-negative entries, non-negative reward
// support, well-formed reward probabilities, initial state/distribution
// consistency. Never repairs or renormalizes.
std::vector<std::string> validate(const TabularMDP& mdp);

// Deterministic per-step state -> action table of size H x |S|.
class NonStationaryPolicy {
 public:
  NonStationaryPolicy(int horizon, int num_states, int fill_action = 0)
      : horizon_(horizon),
        num_states_(num_states),
        table_(static_cast<std::size_t>(horizon) * num_states, fill_action) {}

  int horizon() const { return horizon_; }
  int num_states() const { return num_states_; }

  int action(int h, int s) const { return table_[h * num_states_ + s]; }
  void set_action(int h, int s, int a) { table_[h * num_states_ + s] = a; }

  // Full table; also the deduplication key for policy sets.
  const std::vector<int>& table() const { return table_; }

  bool operator==(const NonStationaryPolicy&) const = default;

 private:
  int horizon_;
  int num_states_;
  std::vector<int> table_;
};

struct TrajectoryStep {
  int state;
  int action;
  double reward;
  bool operator==(const TrajectoryStep&) const = default;
};

// One length-H episode plus the terminal state. Each step's sample draws
// both a reward and a successor, including the last step.
struct Trajectory {
  std::vector<TrajectoryStep> steps;
  int terminal_state = -1;
  double cumulative_reward = 0.0;
  bool operator==(const Trajectory&) const = default;
};

// Absorbs a distribution-initial model into a fixed-initial one: appends a
// fresh state (index |S|) with zero reward whose every action transitions
// according to the old initial distribution, and extends the horizon by 1.
// Values of lifted policies (see lift_policy_for_reduced) are unchanged.
TabularMDP reduce_initial_distribution(const TabularMDP& mdp);

// Extends a policy for the original model to the reduced model: step 0 and
// the appended state play action 0 (the choice is value-irrelevant).
NonStationaryPolicy lift_policy_for_reduced(const NonStationaryPolicy& policy);

}  // namespace olts
