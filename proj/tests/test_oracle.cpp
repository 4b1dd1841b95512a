#include <cmath>
#include <map>
#include <vector>

#include "doctest.h"
#include "olts/env.hpp"
#include "olts/harness.hpp"
#include "olts/oracle.hpp"
#include "olts/rng.hpp"
#include "test_util.hpp"

using namespace olts;

namespace {

// Exhaustive state-path enumeration; the independent oracle for the
// visit-count distribution on tiny models.
void enumerate_paths(const TabularMDP& mdp, const NonStationaryPolicy& policy,
                     int h, int state, double prob, int visits, int s, int a,
                     std::vector<double>& pmf) {
  if (prob == 0.0) return;
  if (h == mdp.horizon()) {
    pmf[visits] += prob;
    return;
  }
  const int act = policy.action(h, state);
  const int next_visits = visits + ((state == s && act == a) ? 1 : 0);
  auto row = mdp.transition_row(state, act);
  for (int sn = 0; sn < mdp.num_states(); ++sn)
    enumerate_paths(mdp, policy, h + 1, sn, prob * row[sn], next_visits, s, a,
                    pmf);
}

std::vector<double> brute_force_visit_pmf(const TabularMDP& mdp,
                                          const NonStationaryPolicy& policy,
                                          int s, int a) {
  std::vector<double> pmf(mdp.horizon() + 1, 0.0);
  enumerate_paths(mdp, policy, 0, mdp.initial_state(), 1.0, 0, s, a, pmf);
  return pmf;
}

// Exact reachability of (s, h) under one policy via forward probabilities.
std::vector<std::uint8_t> reachable_under(const TabularMDP& mdp,
                                          const NonStationaryPolicy& policy) {
  const int S = mdp.num_states(), H = mdp.horizon();
  std::vector<std::uint8_t> reach(static_cast<std::size_t>(H) * S, 0);
  std::vector<double> cur(S, 0.0), nxt(S, 0.0);
  cur[mdp.initial_state()] = 1.0;
  for (int h = 0; h < H; ++h) {
    for (int s = 0; s < S; ++s)
      if (cur[s] > 0.0) reach[h * S + s] = 1;
    std::fill(nxt.begin(), nxt.end(), 0.0);
    for (int s = 0; s < S; ++s) {
      if (cur[s] == 0.0) continue;
      auto row = mdp.transition_row(s, policy.action(h, s));
      for (int sn = 0; sn < S; ++sn) nxt[sn] += cur[s] * row[sn];
    }
    cur.swap(nxt);
  }
  return reach;
}

}  // namespace

TEST_CASE("policy value on hand-checked models") {
  SUBCASE("deterministic chain is worth 1") {
    TabularMDP mdp = test::deterministic_chain(4);
    CHECK(policy_value(mdp, NonStationaryPolicy(4, 1, 0)).root_value ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("two-step stochastic example is worth 0.42") {
    TabularMDP mdp = test::two_state_example();
    const double v =
        policy_value(mdp, test::two_state_example_policy()).root_value;
    CHECK(v == doctest::Approx(0.42).epsilon(1e-12));
  }
  SUBCASE("all-zero rewards are worth 0") {
    TabularMDP mdp = test::stay_or_move(5);
    CHECK(policy_value(mdp, harness::random_policy(2, 2, 5, 11)).root_value ==
          0.0);
  }
}

TEST_CASE("policy value agrees with Monte Carlo") {
  TabularMDP mdp = test::two_state_example();
  NonStationaryPolicy policy = test::two_state_example_policy();
  const double exact = policy_value(mdp, policy).root_value;
  EnvironmentHandle env(mdp, 2024);
  const int n = 100'000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += env.sample_episode(policy).cumulative_reward;
  // Hoeffding at ~4 sigma for [0,1] outcomes.
  CHECK(std::abs(exact - sum / n) <= 4.0 * std::sqrt(1.0 / (4.0 * n)));
}

TEST_CASE("optimal policy argmax and tie-breaking") {
  TabularMDP mdp(1, 2, 1);
  mdp.set_transition(0, 0, 0, 1.0);
  mdp.set_transition(0, 1, 0, 1.0);
  mdp.set_reward(0, 0, RewardDistribution::point(0.2));
  mdp.set_reward(0, 1, RewardDistribution::point(0.8));
  mdp.set_fixed_initial(0);

  auto [policy, tables] = optimal_policy(mdp);
  CHECK(policy.action(0, 0) == 1);
  CHECK(tables.root_value == doctest::Approx(0.8));

  SUBCASE("exact ties pick the lowest action") {
    mdp.set_reward(0, 1, RewardDistribution::point(0.2));
    auto [tied, tied_tables] = optimal_policy(mdp);
    CHECK(tied.action(0, 0) == 0);
    CHECK(tied_tables.root_value == doctest::Approx(0.2));
  }
}

TEST_CASE("optimal policy dominates random policies") {
  TabularMDP mdp = harness::random_mdp(3, 2, 5, 77);
  auto [best, tables] = optimal_policy(mdp);
  for (int k = 0; k < 1000; ++k) {
    NonStationaryPolicy policy = harness::random_policy(3, 2, 5, derive_seed(77, k));
    CHECK(tables.root_value >= policy_value(mdp, policy).root_value - 1e-12);
  }
}

TEST_CASE("admissible pairs") {
  SUBCASE("step one is exactly the initial state") {
    TabularMDP mdp = test::stay_or_move(3);
    AdmissibleSet adm = admissible_pairs(mdp);
    CHECK(adm.contains(0, 0));
    CHECK_FALSE(adm.contains(0, 1));
  }

  SUBCASE("a state with no incoming mass stays excluded") {
    TabularMDP mdp(2, 1, 4);
    mdp.set_transition_row(0, 0, std::vector<double>{1.0, 0.0});
    mdp.set_transition_row(1, 0, std::vector<double>{1.0, 0.0});
    mdp.set_reward(0, 0, RewardDistribution::point(0.0));
    mdp.set_reward(1, 0, RewardDistribution::point(0.0));
    mdp.set_fixed_initial(0);
    AdmissibleSet adm = admissible_pairs(mdp);
    for (int h = 0; h < 4; ++h) CHECK_FALSE(adm.contains(h, 1));
    CHECK(adm.count() == 4);
  }

  SUBCASE("matches exhaustive policy enumeration at H=3") {
    TabularMDP mdp = harness::random_mdp(2, 2, 3, 5,
                                         {.transition_sparsity = 0.5});
    AdmissibleSet adm = admissible_pairs(mdp);
    // Union of per-policy reachability over all 2^(2*3) = 64 policies.
    std::vector<std::uint8_t> expected(6, 0);
    for (int code = 0; code < 64; ++code) {
      NonStationaryPolicy policy(3, 2, 0);
      int bits = code;
      for (int h = 0; h < 3; ++h)
        for (int s = 0; s < 2; ++s) {
          policy.set_action(h, s, bits & 1);
          bits >>= 1;
        }
      auto reach = reachable_under(mdp, policy);
      for (std::size_t i = 0; i < reach.size(); ++i)
        if (reach[i]) expected[i] = 1;
    }
    for (int h = 0; h < 3; ++h)
      for (int s = 0; s < 2; ++s)
        CHECK(adm.contains(h, s) == (expected[h * 2 + s] != 0));
  }

  SUBCASE("both states admissible from step 2 under stay-or-move") {
    TabularMDP mdp = test::stay_or_move(4);
    AdmissibleSet adm = admissible_pairs(mdp);
    for (int h = 1; h < 4; ++h) {
      CHECK(adm.contains(h, 0));
      CHECK(adm.contains(h, 1));
    }
  }
}

TEST_CASE("visit-count distribution") {
  SUBCASE("deterministic self-loop is a point mass at H") {
    TabularMDP mdp = test::stay_or_move(5);
    NonStationaryPolicy stay(5, 2, 0);
    VisitCountPmf pmf = visit_count_pmf(mdp, stay, 0, 0);
    CHECK(pmf.probability[5] == doctest::Approx(1.0).epsilon(1e-12));
    VisitCountPmf other = visit_count_pmf(mdp, stay, 1, 0);
    CHECK(other.probability[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(visit_count_pmf(mdp, stay, 0, 1).probability[0] ==
          doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("means over all pairs sum to H") {
    TabularMDP mdp = harness::random_mdp(3, 2, 7, 9);
    NonStationaryPolicy policy = harness::random_policy(3, 2, 7, 10);
    double total = 0.0;
    for (int s = 0; s < 3; ++s)
      for (int a = 0; a < 2; ++a) {
        VisitCountPmf pmf = visit_count_pmf(mdp, policy, s, a);
        double mass = 0.0;
        for (double p : pmf.probability) mass += p;
        CHECK(std::abs(mass - 1.0) <= 1e-12);
        total += pmf.mean();
      }
    CHECK(std::abs(total - 7.0) <= 1e-9);
  }

  SUBCASE("matches brute-force path enumeration at H=3") {
    TabularMDP mdp(2, 1, 3);
    mdp.set_transition_row(0, 0, std::vector<double>{0.5, 0.5});
    mdp.set_transition_row(1, 0, std::vector<double>{0.5, 0.5});
    mdp.set_reward(0, 0, RewardDistribution::point(0.1));
    mdp.set_reward(1, 0, RewardDistribution::point(0.2));
    mdp.set_fixed_initial(0);
    NonStationaryPolicy policy(3, 2, 0);
    for (int s = 0; s < 2; ++s) {
      VisitCountPmf pmf = visit_count_pmf(mdp, policy, s, 0);
      std::vector<double> expected = brute_force_visit_pmf(mdp, policy, s, 0);
      REQUIRE(pmf.probability.size() == expected.size());
      for (std::size_t c = 0; c < expected.size(); ++c)
        CHECK(pmf.probability[c] == doctest::Approx(expected[c]).epsilon(1e-12));
    }
  }
}

TEST_CASE("visit potential") {
  SUBCASE("self-loop policy reaches H at any delta") {
    TabularMDP mdp = test::stay_or_move(6);
    std::vector<NonStationaryPolicy> policies = {NonStationaryPolicy(6, 2, 0)};
    CHECK(mu_potential(mdp, policies, 0.5, 0, 0) == 6);
  }

  SUBCASE("unvisited pairs have potential 0") {
    TabularMDP mdp = test::stay_or_move(6);
    std::vector<NonStationaryPolicy> policies = {NonStationaryPolicy(6, 2, 0)};
    CHECK(mu_potential(mdp, policies, 0.5, 1, 1) == 0);
    CHECK(mu_potential(mdp, policies, 1e-9, 1, 1) == 0);
  }

  SUBCASE("coin-flip visitation thresholds at delta") {
    // State 1 is reached at step 2 with probability 0.5; the pair (1, a0)
    // is then visited exactly once.
    TabularMDP mdp(2, 1, 2);
    mdp.set_transition_row(0, 0, std::vector<double>{0.5, 0.5});
    mdp.set_transition_row(1, 0, std::vector<double>{0.0, 1.0});
    mdp.set_reward(0, 0, RewardDistribution::point(0.0));
    mdp.set_reward(1, 0, RewardDistribution::point(0.0));
    mdp.set_fixed_initial(0);
    std::vector<NonStationaryPolicy> policies = {NonStationaryPolicy(2, 2, 0)};
    CHECK(mu_potential(mdp, policies, 0.6, 1, 0) == 0);
    CHECK(mu_potential(mdp, policies, 0.4, 1, 0) == 1);
  }

  SUBCASE("monotone in delta and in the policy set") {
    TabularMDP mdp = harness::random_mdp(2, 2, 6, 21);
    std::vector<NonStationaryPolicy> small = {
        harness::random_policy(2, 2, 6, 1), harness::random_policy(2, 2, 6, 2)};
    std::vector<NonStationaryPolicy> large = small;
    large.push_back(harness::random_policy(2, 2, 6, 3));
    for (int s = 0; s < 2; ++s)
      for (int a = 0; a < 2; ++a) {
        int prev = 6 + 1;
        for (double delta : {0.1, 0.3, 0.5, 0.9}) {
          const int mu = mu_potential(mdp, small, delta, s, a);
          CHECK(mu <= prev);
          prev = mu;
        }
        CHECK(mu_potential(mdp, large, 0.3, s, a) >=
              mu_potential(mdp, small, 0.3, s, a));
      }
  }
}

TEST_CASE("values stay in [0,1] at admissible pairs") {
  int checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    TabularMDP mdp = harness::random_mdp(3, 2, 6, derive_seed(1000, trial),
                                         {.transition_sparsity = 0.3});
    AdmissibleSet adm = admissible_pairs(mdp);
    for (int k = 0; k < 100; ++k) {
      NonStationaryPolicy policy =
          harness::random_policy(3, 2, 6, derive_seed(2000, trial * 100 + k));
      ValueTables tables = policy_value(mdp, policy);
      for (int h = 0; h < 6; ++h)
        for (int s = 0; s < 3; ++s) {
          if (!adm.contains(h, s)) continue;
          const bool v_ok = tables.value(h, s) >= -1e-12 &&
                            tables.value(h, s) <= 1.0 + 1e-9;
          bool q_ok = true;
          for (int a = 0; a < 2; ++a)
            q_ok = q_ok && tables.action_value(h, s, a) >= -1e-12 &&
                   tables.action_value(h, s, a) <= 1.0 + 1e-9;
          if (v_ok && q_ok) ++checked;
          REQUIRE(v_ok);
          REQUIRE(q_ok);
        }
    }
  }
  CHECK(checked > 0);
}
