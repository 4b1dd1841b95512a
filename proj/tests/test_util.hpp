#pragma once

#include <vector>

#include "olts/mdp.hpp"

namespace olts::test {

// 1-state, 1-action chain paying 1/H per step; cumulative reward is exactly
// 1 when H is a power of two.
inline TabularMDP deterministic_chain(int horizon) {
  TabularMDP mdp(1, 1, horizon);
  mdp.set_transition(0, 0, 0, 1.0);
  mdp.set_reward(0, 0, RewardDistribution::point(1.0 / horizon));
  mdp.set_fixed_initial(0);
  return mdp;
}

// Two states, two actions, H = 2. Action 0 at the start state pays 0.2 and
// moves to state 1 with probability 0.3; action 1 pays 0.1 at state 0 and
// both actions pay 0.5 at state 1. The policy below is worth exactly
// 0.2 + 0.3*0.5 + 0.7*0.1 = 0.42.
inline TabularMDP two_state_example() {
  TabularMDP mdp(2, 2, 2);
  const std::vector<double> from0 = {0.7, 0.3};
  const std::vector<double> stay0 = {1.0, 0.0};
  mdp.set_transition_row(0, 0, from0);
  mdp.set_transition_row(0, 1, stay0);
  mdp.set_transition_row(1, 0, stay0);
  mdp.set_transition_row(1, 1, stay0);
  mdp.set_reward(0, 0, RewardDistribution::point(0.2));
  mdp.set_reward(0, 1, RewardDistribution::point(0.1));
  mdp.set_reward(1, 0, RewardDistribution::point(0.5));
  mdp.set_reward(1, 1, RewardDistribution::point(0.5));
  mdp.set_fixed_initial(0);
  return mdp;
}

inline NonStationaryPolicy two_state_example_policy() {
  NonStationaryPolicy policy(2, 2, 0);
  policy.set_action(1, 0, 1);  // step 2 at state 0 plays action 1 (pays 0.1)
  policy.set_action(1, 1, 0);
  return policy;
}

// Two states, two actions: action 0 stays, action 1 moves to the other
// state. Deterministic transitions, zero rewards unless overridden.
inline TabularMDP stay_or_move(int horizon) {
  TabularMDP mdp(2, 2, horizon);
  const std::vector<double> to0 = {1.0, 0.0};
  const std::vector<double> to1 = {0.0, 1.0};
  mdp.set_transition_row(0, 0, to0);
  mdp.set_transition_row(0, 1, to1);
  mdp.set_transition_row(1, 0, to1);
  mdp.set_transition_row(1, 1, to0);
  mdp.set_fixed_initial(0);
  return mdp;
}

inline NonStationaryPolicy constant_policy(int horizon, int num_states,
                                           int action) {
  return NonStationaryPolicy(horizon, num_states, action);
}

}  // namespace olts::test
