#include "olts/env.hpp"

#include <cstdio>
#include <stdexcept>

#include "olts/errors.hpp"

namespace olts {

Trajectory EnvironmentHandle::sample_episode(const NonStationaryPolicy& policy) {
  const TabularMDP& m = *model_;
  if (policy.horizon() != m.horizon() || policy.num_states() != m.num_states())
    throw std::invalid_argument("sample_episode: policy/model size mismatch");
  if (!m.has_fixed_initial())
    throw std::invalid_argument(
        "sample_episode: model needs a fixed initial state "
        "(see reduce_initial_distribution)");

  Trajectory traj;
  traj.steps.reserve(m.horizon());
  int s = m.initial_state();
  double total = 0.0;
  for (int h = 0; h < m.horizon(); ++h) {
    const int a = policy.action(h, s);
    const double r = m.reward(s, a).sample(rng_);
    const int next = sample_categorical(m.transition_row(s, a), rng_);
    traj.steps.push_back({s, a, r});
    total += r;
    s = next;
  }
  traj.terminal_state = s;
  traj.cumulative_reward = total;
  ++episodes_;
  if (total > 1.0 + kCumulativeRewardTolerance) {
    char buf[96];
    std::snprintf(buf, sizeof(buf),
                  "episode cumulative reward %.12g exceeds 1", total);
    throw ModelViolation(buf);
  }
  return traj;
}

}  // namespace olts
