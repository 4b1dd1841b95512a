#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "olts/env.hpp"
#include "olts/mdp.hpp"

namespace olts {

// Per-(s, a) chronologically ordered sample sequences with consumption
// cursors. Samples are only appended, never reordered; cursors are reset at
// the start of every simulate pass and each sample is consumed at most once
// per pass.
//
// One simulate pass consumes at most H samples from any one sequence, so a
// keep limit of H per pair preserves simulate's behavior exactly while
// bounding memory; total_appended still counts every offered sample.
class ReplayBuffer {
 public:
  struct Sample {
    int next_state;
    double reward;
    bool operator==(const Sample&) const = default;
  };

  static constexpr std::size_t kUnlimited =
      std::numeric_limits<std::size_t>::max();

  ReplayBuffer(int num_states, int num_actions,
               std::size_t max_kept_per_pair = kUnlimited);

  void clear();          // drops all samples; capacity stays reserved
  void reset_cursors();  // marks everything unused
  void append(int s, int a, Sample sample);
  std::optional<Sample> consume(int s, int a);  // next unused, else nullopt

  std::size_t size(int s, int a) const { return data_[s * num_actions_ + a].size(); }
  std::size_t total_retained() const;
  std::uint64_t total_appended() const { return appended_; }

 private:
  int num_states_;
  int num_actions_;
  std::size_t cap_;
  std::vector<std::vector<Sample>> data_;
  std::vector<std::size_t> cursor_;
  std::uint64_t appended_ = 0;
};

// tau: episodes collected per known policy on every recollection, i.e.
// ceil(scale * (16*S*A/delta_sim) * ln(4*S*A/delta_sim)), at least 1.
int synthesis_repetitions(int num_states, int num_actions, double delta_sim,
                          double scale = 1.0);

// One independent trajectory simulator: a replay buffer plus the ordered set
// of policies that have been rolled out into it. simulate() costs zero
// environment episodes; rollout() recollects the whole buffer.
class TrajectorySynthesizer {
 public:
  TrajectorySynthesizer(const TabularMDP& model, int repetitions,
                        std::size_t buffer_cap_per_pair = ReplayBuffer::kUnlimited);

  // Replays one trajectory for `policy` from buffered samples, consuming the
  // first unused sample of the visited pair at each step. Returns nullopt
  // (Fail) the moment a needed sequence is exhausted. Deterministic given
  // the buffer contents.
  std::optional<Trajectory> simulate(const NonStationaryPolicy& policy);

  // Discards the buffer, adds `policy` to the known set if absent, then
  // samples `repetitions` fresh episodes for every known policy, storing
  // each step's (successor, reward). Returns the first episode sampled for
  // `policy`.
  Trajectory rollout(const NonStationaryPolicy& policy, EnvironmentHandle& env);

  const std::vector<NonStationaryPolicy>& known_policies() const {
    return known_policies_;
  }
  int repetitions() const { return repetitions_; }
  const ReplayBuffer& buffer() const { return buffer_; }

 private:
  const TabularMDP* model_;
  int repetitions_;
  ReplayBuffer buffer_;
  std::vector<NonStationaryPolicy> known_policies_;
};

struct SynthesizedOutcome {
  bool fail = false;
  double reward = 0.0;  // cumulative episode reward; 0 for Fail
  bool operator==(const SynthesizedOutcome&) const = default;
};

// One row per gate decision; mu_* fields are filled only when diagnostics
// are enabled and the gate fired (mu over the known set at
// delta_sim / (2*S*A), from the exact model).
struct GateDecision {
  int policy_index = -1;
  int fail_count = 0;
  bool fired = false;
  std::uint64_t episodes_after = 0;
  int rollout_events_after = 0;
  int mu_state = -1;
  int mu_action = -1;
  int mu_before = -1;
  int mu_after = -1;
  bool operator==(const GateDecision&) const = default;
};

struct SynthesisOptions {
  double delta_sim = 0.125;
  int num_copies = 1;   // F
  double scale = 1.0;   // multiplies tau
  std::uint64_t master_seed = 0;
  bool parallel = false;
  bool diagnostics = false;
  bool keep_trajectories = true;
};

struct SimAllResult {
  int tau = 0;
  int num_copies = 0;
  std::vector<std::uint8_t> rolled_out;                   // per policy
  std::vector<std::vector<SynthesizedOutcome>> outcomes;  // [policy][copy]
  // Present only when keep_trajectories; Fail entries are nullopt.
  std::vector<std::vector<std::optional<Trajectory>>> trajectories;
  std::vector<GateDecision> gate_log;
  std::uint64_t total_episodes = 0;
  int rollout_events = 0;  // gate firings; every copy rolls out on each
};

// Evaluates every policy on `num_copies` independent simulators. Per policy:
// all copies simulate; if more than (3*delta_sim/2)*F copies Fail, every
// copy rolls out instead, so per policy either all results come from replay
// or all from fresh episodes. Copies draw on disjoint sub-streams of
// master_seed, which makes the result independent of `parallel`.
SimAllResult sim_all(const TabularMDP& model,
                     const std::vector<NonStationaryPolicy>& policies,
                     const SynthesisOptions& options,
                     const std::function<EnvironmentHandle(int)>& env_factory);

// Convenience overload: copy i's environment is seeded with
// derive_seed(master_seed, i).
SimAllResult sim_all(const TabularMDP& model,
                     const std::vector<NonStationaryPolicy>& policies,
                     const SynthesisOptions& options);

}  // namespace olts
