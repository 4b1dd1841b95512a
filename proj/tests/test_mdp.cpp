#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "olts/env.hpp"
#include "olts/errors.hpp"
#include "olts/mdp.hpp"
#include "olts/oracle.hpp"
#include "olts/rng.hpp"
#include "test_util.hpp"

using namespace olts;

TEST_CASE("validate accepts row sums at the tolerance boundary") {
  TabularMDP mdp(1, 1, 2);
  mdp.set_transition(0, 0, 0, 0.999999999);  // off by 1e-9
  mdp.set_reward(0, 0, RewardDistribution::point(0.1));
  mdp.set_fixed_initial(0);
  CHECK(validate(mdp).empty());
}

TEST_CASE("validate reports bad rows without repairing them") {
  TabularMDP mdp(2, 1, 2);
  mdp.set_transition_row(0, 0, std::vector<double>{0.51, 0.5});  // sums to 1.01
  mdp.set_transition_row(1, 0, std::vector<double>{0.5, 0.5});
  mdp.set_reward(0, 0, RewardDistribution::point(0.1));
  mdp.set_reward(1, 0, RewardDistribution::point(0.1));
  mdp.set_fixed_initial(0);

  auto violations = validate(mdp);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].find("transition row (s=0, a=0)") != std::string::npos);
  // No silent renormalization.
  CHECK(mdp.transition_row(0, 0)[0] == 0.51);

  SUBCASE("negative reward support") {
    mdp.set_reward(1, 0, RewardDistribution{{-0.25}, {1.0}});
    auto more = validate(mdp);
    REQUIRE(more.size() == 2);
    CHECK(more[1].find("negative support") != std::string::npos);
  }
}

TEST_CASE("deterministic chain pays exactly 1") {
  TabularMDP mdp = test::deterministic_chain(4);
  EnvironmentHandle env(mdp, 7);
  Trajectory traj = env.sample_episode(NonStationaryPolicy(4, 1, 0));
  REQUIRE(traj.steps.size() == 4);
  CHECK(traj.cumulative_reward == 1.0);
  CHECK(traj.terminal_state == 0);
}

TEST_CASE("H=1 degenerates to a bandit draw") {
  TabularMDP mdp(1, 2, 1);
  mdp.set_transition(0, 0, 0, 1.0);
  mdp.set_transition(0, 1, 0, 1.0);
  mdp.set_reward(0, 0, RewardDistribution::point(0.2));
  mdp.set_reward(0, 1, RewardDistribution::point(0.7));
  mdp.set_fixed_initial(0);

  EnvironmentHandle env(mdp, 1);
  NonStationaryPolicy pull_arm1(1, 1, 1);
  Trajectory traj = env.sample_episode(pull_arm1);
  REQUIRE(traj.steps.size() == 1);
  CHECK(traj.steps[0].state == 0);
  CHECK(traj.steps[0].action == 1);
  CHECK(traj.steps[0].reward == 0.7);
}

TEST_CASE("sampled transition frequencies match the model") {
  TabularMDP mdp = test::two_state_example();
  EnvironmentHandle env(mdp, 123);
  NonStationaryPolicy policy(2, 2, 0);
  const int n = 100'000;
  int hits = 0;
  for (int i = 0; i < n; ++i)
    if (env.sample_episode(policy).steps[1].state == 1) ++hits;
  const double freq = static_cast<double>(hits) / n;
  CHECK(std::abs(freq - 0.3) < 0.01);
}

TEST_CASE("episode accounting is exact") {
  TabularMDP mdp = test::deterministic_chain(4);
  EnvironmentHandle env(mdp, 3);
  NonStationaryPolicy policy(4, 1, 0);
  CHECK(env.episodes_sampled() == 0);
  for (int k = 1; k <= 17; ++k) {
    env.sample_episode(policy);
    CHECK(env.episodes_sampled() == static_cast<std::uint64_t>(k));
  }
}

TEST_CASE("equal seeds give bitwise-identical trajectories") {
  TabularMDP mdp = test::two_state_example();
  mdp.set_reward(0, 0, RewardDistribution{{0.0, 0.2}, {0.5, 0.5}});
  EnvironmentHandle a(mdp, 99), b(mdp, 99);
  NonStationaryPolicy policy = test::two_state_example_policy();
  for (int i = 0; i < 50; ++i) {
    Trajectory ta = a.sample_episode(policy);
    Trajectory tb = b.sample_episode(policy);
    CHECK(ta == tb);
  }
}

TEST_CASE("cumulative rewards beyond 1 raise a model violation") {
  TabularMDP mdp(1, 1, 2);
  mdp.set_transition(0, 0, 0, 1.0);
  mdp.set_reward(0, 0, RewardDistribution::point(0.6));  // 1.2 over 2 steps
  mdp.set_fixed_initial(0);
  EnvironmentHandle env(mdp, 0);
  CHECK_THROWS_AS(env.sample_episode(NonStationaryPolicy(2, 1, 0)),
                  ModelViolation);
}

TEST_CASE("initial-distribution reduction") {
  TabularMDP base = test::two_state_example();

  SUBCASE("point mass keeps values unchanged") {
    TabularMDP dist = base;
    dist.set_initial_distribution({1.0, 0.0});
    TabularMDP reduced = reduce_initial_distribution(dist);
    CHECK(reduced.num_states() == 3);
    CHECK(reduced.horizon() == 3);
    CHECK(reduced.initial_state() == 2);

    NonStationaryPolicy policy = test::two_state_example_policy();
    const double direct = policy_value(base, policy).root_value;
    const double lifted =
        policy_value(reduced, lift_policy_for_reduced(policy)).root_value;
    CHECK(lifted == doctest::Approx(direct).epsilon(1e-12));
    CHECK(direct == doctest::Approx(0.42).epsilon(1e-12));
  }

  SUBCASE("general distribution matches the mixture of state values") {
    TabularMDP dist = base;
    dist.set_initial_distribution({0.5, 0.5});
    TabularMDP reduced = reduce_initial_distribution(dist);

    NonStationaryPolicy policy = test::two_state_example_policy();
    ValueTables tables = policy_value(base, policy);
    const double mixture = 0.5 * tables.value(0, 0) + 0.5 * tables.value(0, 1);
    const double lifted =
        policy_value(reduced, lift_policy_for_reduced(policy)).root_value;
    CHECK(std::abs(lifted - mixture) <= 1e-12);
  }

  SUBCASE("zero probabilities are preserved exactly") {
    TabularMDP dist = base;
    dist.set_initial_distribution({1.0, 0.0});
    TabularMDP reduced = reduce_initial_distribution(dist);
    for (int a = 0; a < reduced.num_actions(); ++a) {
      auto row = reduced.transition_row(2, a);
      CHECK(row[0] == 1.0);
      CHECK(row[1] == 0.0);
      CHECK(row[2] == 0.0);
      CHECK(row[0] + row[1] + row[2] == 1.0);
    }
    CHECK(validate(reduced).empty());
  }

  SUBCASE("fixed-initial input is rejected") {
    CHECK_THROWS_AS(reduce_initial_distribution(base), std::invalid_argument);
  }
}

TEST_CASE("reward distributions sample their support") {
  RewardDistribution r{{0.1, 0.4}, {0.25, 0.75}};
  SplitRng rng(5);
  double sum = 0.0;
  const int n = 40'000;
  for (int i = 0; i < n; ++i) sum += r.sample(rng);
  CHECK(std::abs(sum / n - r.mean()) < 0.005);
  CHECK(r.mean() == doctest::Approx(0.325));
}

TEST_CASE("derived seeds differ per stream id") {
  CHECK(derive_seed(42, 0) != derive_seed(42, 1));
  CHECK(derive_seed(42, 0) == derive_seed(42, 0));
  SplitRng root(42);
  SplitRng a = root.split(1);
  SplitRng b = root.split(2);
  CHECK(a.next_u64() != b.next_u64());
}
