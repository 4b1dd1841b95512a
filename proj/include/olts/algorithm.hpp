#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "olts/env.hpp"
#include "olts/policy_net.hpp"
#include "olts/synthesis.hpp"

namespace olts {

// Run parameters plus the derived constants. delta_sim is pinned at
// epsilon/8; the copy count F and per-rollout repetitions tau follow their
// formulas at scale 1 and shrink proportionally (floored at 1) below it.
// Every derived value is echoed into the EvaluationReport.
struct AlgoConfig {
  double epsilon = 0.25;
  double delta_overall = 0.1;
  double scale = 1.0;  // c in (0, 1]
  std::uint64_t seed = 0;
  bool parallel = true;
  bool diagnostics = false;

  double delta_sim() const { return epsilon / 8.0; }
  int num_copies(std::size_t num_policies) const;  // F
};

// F = ceil(scale * max{64 ln(4|Pi|/delta) / eps^2, 192 ln(2|Pi|/delta) / eps}),
// at least 1.
int evaluation_copies(double epsilon, double delta_overall,
                      std::size_t num_policies, double scale = 1.0);

struct EvaluationReport {
  // Config echo.
  double epsilon = 0.0;
  double delta_overall = 0.0;
  double delta_sim = 0.0;
  double scale = 1.0;
  std::uint64_t seed = 0;
  int num_copies = 0;  // F
  int tau = 0;
  std::size_t num_policies = 0;

  // Per-policy outcomes.
  std::vector<double> empirical_value;  // mean of F scores, Fail scoring 0
  std::vector<int> fail_count;
  std::vector<std::uint8_t> rolled_out;

  int chosen_index = -1;  // argmax of empirical_value, lowest index on ties
  std::uint64_t total_episodes = 0;
  int rollout_events = 0;
  std::vector<GateDecision> gate_log;
};

// Evaluates every policy through sim_all and returns the one with the
// largest empirical mean reward. Sampling happens on internal per-copy
// handles seeded from cfg.seed; env only provides the model, and its own
// episode counter is untouched (totals are in the report).
std::pair<NonStationaryPolicy, EvaluationReport> select_policy(
    EnvironmentHandle& env, const std::vector<NonStationaryPolicy>& policies,
    const AlgoConfig& cfg);

// Builds the policy net for `net_grid` first, then delegates to
// select_policy. On a budget failure the error also reports the grid the
// accuracy-matched resolution eps/(32*H*|S|) would have required.
std::pair<NonStationaryPolicy, EvaluationReport> select_policy_with_net(
    EnvironmentHandle& env, const AlgoConfig& cfg, GridSpec net_grid,
    const NetBuildOptions& net_options = {});

// Baseline: F genuine episodes per policy through `env` (its counter
// advances by |Pi| * F), argmax of the empirical means.
std::pair<NonStationaryPolicy, EvaluationReport> naive_monte_carlo(
    EnvironmentHandle& env, const std::vector<NonStationaryPolicy>& policies,
    int num_episodes_per_policy);

// Policy-set providers for the CLI and the harness.
std::vector<NonStationaryPolicy> random_policy_set(int num_states,
                                                   int num_actions, int horizon,
                                                   int count,
                                                   std::uint64_t seed);

// Every deterministic policy table; throws BudgetExceeded when A^(S*H)
// exceeds the budget.
std::vector<NonStationaryPolicy> exhaustive_policy_set(
    int num_states, int num_actions, int horizon,
    std::uint64_t budget = 1'000'000);

}  // namespace olts
