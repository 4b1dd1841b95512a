#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "olts/algorithm.hpp"
#include "olts/csv.hpp"
#include "olts/mdp.hpp"

namespace olts::harness {

// Empirical pass/fail targets used by the statistics layer and the
// acceptance suite. These are harness constants, not algorithm parameters;
// they live here so every threshold is auditable in one place.
struct Thresholds {
  double fidelity_tv_max = 0.02;
  double fidelity_fail_margin = 0.02;  // fail rate <= 2*delta_sim + margin
  int pac_required_successes = 18;
  int pac_total_seeds = 20;
  double horizon_episode_ratio_max = 5.0;
  double policy_episode_ratio_max = 6.0;
  int fidelity_default_samples = 50'000;
};

const Thresholds& thresholds();

// Test-battery generators. Deterministic per seed.
struct MdpGenOptions {
  // Fraction of transition entries zeroed before normalizing; each row
  // keeps at least one positive entry. 0 gives dense rows.
  double transition_sparsity = 0.0;
  // Rewards are deterministic u^2 values scaled so every episode's sum
  // stays within 1 (squaring spreads policy values apart).
};

TabularMDP random_mdp(int num_states, int num_actions, int horizon,
                      std::uint64_t seed, const MdpGenOptions& options = {});

NonStationaryPolicy random_policy(int num_states, int num_actions, int horizon,
                                  std::uint64_t seed);

// One statistic against one threshold; pass iff statistic <= threshold.
struct StatTestResult {
  std::string name;
  double statistic = 0.0;
  double threshold = 0.0;
  bool pass = false;
  std::uint64_t sample_a = 0;
  std::uint64_t sample_b = 0;
};

enum class BinningMode {
  kAuto,            // full trajectories on small instances, else marginals
  kFullTrajectory,  // error when the instance exceeds the cap
  kStepMarginals,
};

struct FidelityOptions {
  int samples = 50'000;
  double delta_sim = 0.125;
  double scale = 1.0;  // multiplies tau
  std::uint64_t seed = 0;
  BinningMode binning = BinningMode::kAuto;
  bool parallel = true;
  // Full-trajectory binning cap; beyond this the trajectory space is too
  // large to compare directly and per-step marginals are used instead.
  int full_bin_max_horizon = 4;
  int full_bin_max_states = 3;
};

// Repeats {fresh simulator, rollout(fill), simulate(test)} N times and
// compares the non-Fail trajectory distribution against N environment
// episodes of `test`. Returns a total-variation row (conditioned on not
// failing) and a fail-frequency row. Deterministic per seed regardless of
// `parallel`.
std::vector<StatTestResult> fidelity_test(const TabularMDP& mdp,
                                          const NonStationaryPolicy& fill,
                                          const NonStationaryPolicy& test,
                                          const FidelityOptions& options);

enum class Algo { kSynthesis, kNaive };

std::string algo_name(Algo algo);

// One experiment point: a seeded battery (random model, random policies
// plus the exact optimal policy) evaluated by one algorithm.
struct PointSpec {
  Algo algo = Algo::kSynthesis;
  int num_states = 2;
  int num_actions = 2;
  int horizon = 16;
  int policy_count = 65;  // includes the appended optimal policy
  double epsilon = 0.25;
  double delta_overall = 0.1;
  double scale = 1.0;
  std::uint64_t seed = 0;
  bool parallel = true;
  double transition_sparsity = 0.0;
};

struct PointResult {
  EvaluationReport report;
  double chosen_value = 0.0;
  double optimal_value = 0.0;
  double suboptimality = 0.0;
  double wall_ms = 0.0;
};

// Builds the battery for `spec.seed` and runs the algorithm on it.
PointResult run_point(const PointSpec& spec);

enum class SweepAxis { kHorizon, kPolicyCount, kEpsilon };

std::string axis_name(SweepAxis axis);

struct SweepSpec {
  SweepAxis axis = SweepAxis::kHorizon;
  std::vector<double> values;  // strictly increasing
  int repetitions = 1;
  std::uint64_t base_seed = 0;
  std::vector<Algo> algorithms = {Algo::kSynthesis};
  // Point template; the axis overrides one field per value.
  PointSpec base;
  // Wall-clock column is opt-in: it is the one field that would break the
  // byte-identical-output contract.
  bool timing = false;
};

// Stable, versioned column set: one row per (axis value, repetition,
// algorithm), in that order.
std::vector<std::string> sweep_columns(bool timing);

csv::Table run_sweep(const SweepSpec& spec);
csv::Table point_row_table(const PointSpec& spec, const PointResult& result,
                           SweepAxis axis, double axis_value, int rep,
                           bool timing);

// Writes `<stem>.csv` and `<stem>_summary.txt` under out_dir and returns
// their paths. Identical inputs yield byte-identical files.
std::pair<std::string, std::string> emit_report(
    const csv::Table& table, const std::vector<std::string>& meta_lines,
    const std::string& out_dir, const std::string& stem);

csv::Table stat_results_table(const std::vector<StatTestResult>& results);

}  // namespace olts::harness
