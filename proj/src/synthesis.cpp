#include "olts/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <stdexcept>

#include "olts/oracle.hpp"
#include "olts/rng.hpp"

namespace olts {

ReplayBuffer::ReplayBuffer(int num_states, int num_actions,
                           std::size_t max_kept_per_pair)
    : num_states_(num_states),
      num_actions_(num_actions),
      cap_(max_kept_per_pair),
      data_(static_cast<std::size_t>(num_states) * num_actions),
      cursor_(static_cast<std::size_t>(num_states) * num_actions, 0) {}

void ReplayBuffer::clear() {
  for (auto& seq : data_) seq.clear();
  std::fill(cursor_.begin(), cursor_.end(), 0);
  appended_ = 0;
}

void ReplayBuffer::reset_cursors() {
  std::fill(cursor_.begin(), cursor_.end(), 0);
}

void ReplayBuffer::append(int s, int a, Sample sample) {
  ++appended_;
  auto& seq = data_[s * num_actions_ + a];
  if (seq.size() < cap_) seq.push_back(sample);
}

std::optional<ReplayBuffer::Sample> ReplayBuffer::consume(int s, int a) {
  const std::size_t idx = static_cast<std::size_t>(s * num_actions_ + a);
  std::size_t& cur = cursor_[idx];
  const auto& seq = data_[idx];
  if (cur >= seq.size()) return std::nullopt;
  return seq[cur++];
}

std::size_t ReplayBuffer::total_retained() const {
  std::size_t n = 0;
  for (const auto& seq : data_) n += seq.size();
  return n;
}

int synthesis_repetitions(int num_states, int num_actions, double delta_sim,
                          double scale) {
  if (!(delta_sim > 0.0 && delta_sim < 1.0))
    throw std::invalid_argument("delta_sim must be in (0, 1)");
  const double sa = static_cast<double>(num_states) * num_actions;
  const double raw = 16.0 * sa / delta_sim * std::log(4.0 * sa / delta_sim);
  return std::max(1, static_cast<int>(std::ceil(scale * raw)));
}

TrajectorySynthesizer::TrajectorySynthesizer(const TabularMDP& model,
                                             int repetitions,
                                             std::size_t buffer_cap_per_pair)
    : model_(&model),
      repetitions_(repetitions),
      buffer_(model.num_states(), model.num_actions(), buffer_cap_per_pair) {
  if (repetitions < 1)
    throw std::invalid_argument("TrajectorySynthesizer: repetitions must be >= 1");
}

std::optional<Trajectory> TrajectorySynthesizer::simulate(
    const NonStationaryPolicy& policy) {
  const TabularMDP& m = *model_;
  if (policy.horizon() != m.horizon() || policy.num_states() != m.num_states())
    throw std::invalid_argument("simulate: policy/model size mismatch");
  buffer_.reset_cursors();
  Trajectory traj;
  traj.steps.reserve(m.horizon());
  int s = m.initial_state();
  double total = 0.0;
  for (int h = 0; h < m.horizon(); ++h) {
    const int a = policy.action(h, s);
    const auto sample = buffer_.consume(s, a);
    if (!sample) return std::nullopt;
    traj.steps.push_back({s, a, sample->reward});
    total += sample->reward;
    s = sample->next_state;
  }
  traj.terminal_state = s;
  traj.cumulative_reward = total;
  return traj;
}

Trajectory TrajectorySynthesizer::rollout(const NonStationaryPolicy& policy,
                                          EnvironmentHandle& env) {
  buffer_.clear();
  if (std::find(known_policies_.begin(), known_policies_.end(), policy) ==
      known_policies_.end())
    known_policies_.push_back(policy);

  std::optional<Trajectory> returned;
  for (const auto& known : known_policies_) {
    const bool is_target = (known == policy);
    for (int rep = 0; rep < repetitions_; ++rep) {
      Trajectory traj = env.sample_episode(known);
      for (int h = 0; h < static_cast<int>(traj.steps.size()); ++h) {
        const auto& step = traj.steps[h];
        const int next = (h + 1 < static_cast<int>(traj.steps.size()))
                             ? traj.steps[h + 1].state
                             : traj.terminal_state;
        buffer_.append(step.state, step.action, {next, step.reward});
      }
      if (is_target && rep == 0) returned = std::move(traj);
    }
  }
  return std::move(*returned);
}

namespace {

// Runs fn(copy) for every copy, serially in index order or via OpenMP.
// Results must not depend on execution order (each copy is self-contained).
// The first exception raised inside the parallel region is rethrown after it.
template <typename Fn>
void for_each_copy(int num_copies, bool parallel, Fn&& fn) {
  if (!parallel) {
    for (int i = 0; i < num_copies; ++i) fn(i);
    return;
  }
  std::exception_ptr error;
#pragma omp parallel for schedule(static)
  for (int i = 0; i < num_copies; ++i) {
    try {
      fn(i);
    } catch (...) {
#pragma omp critical
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace

SimAllResult sim_all(const TabularMDP& model,
                     const std::vector<NonStationaryPolicy>& policies,
                     const SynthesisOptions& options,
                     const std::function<EnvironmentHandle(int)>& env_factory) {
  if (options.num_copies < 1)
    throw std::invalid_argument("sim_all: num_copies must be >= 1");
  if (!(options.delta_sim > 0.0 && options.delta_sim < 1.0))
    throw std::invalid_argument("sim_all: delta_sim must be in (0, 1)");

  const int F = options.num_copies;
  const int tau = synthesis_repetitions(model.num_states(), model.num_actions(),
                                        options.delta_sim, options.scale);
  const double gate_threshold = 1.5 * options.delta_sim * F;

  SimAllResult result;
  result.tau = tau;
  result.num_copies = F;
  result.rolled_out.assign(policies.size(), 0);
  result.outcomes.assign(policies.size(), {});
  if (options.keep_trajectories) result.trajectories.assign(policies.size(), {});

  std::vector<TrajectorySynthesizer> copies;
  std::vector<EnvironmentHandle> envs;
  copies.reserve(F);
  envs.reserve(F);
  for (int i = 0; i < F; ++i) {
    // Keep limit H per pair: simulate never looks deeper (see ReplayBuffer).
    copies.emplace_back(model, tau, static_cast<std::size_t>(model.horizon()));
    envs.push_back(env_factory(i));
  }

  std::vector<std::optional<Trajectory>> slots(F);
  const double mu_delta =
      options.delta_sim /
      (2.0 * model.num_states() * model.num_actions());

  for (std::size_t j = 0; j < policies.size(); ++j) {
    const NonStationaryPolicy& policy = policies[j];
    for_each_copy(F, options.parallel,
                  [&](int i) { slots[i] = copies[i].simulate(policy); });
    int fail_count = 0;
    for (const auto& z : slots)
      if (!z) ++fail_count;

    GateDecision decision;
    decision.policy_index = static_cast<int>(j);
    decision.fail_count = fail_count;
    decision.fired = fail_count > gate_threshold;

    if (decision.fired) {
      if (options.diagnostics) {
        // Known sets evolve identically across copies; copy 0 stands in.
        const auto before =
            mu_potential_all(model, copies[0].known_policies(), mu_delta);
        auto with_policy = copies[0].known_policies();
        if (std::find(with_policy.begin(), with_policy.end(), policy) ==
            with_policy.end())
          with_policy.push_back(policy);
        const auto after = mu_potential_all(model, with_policy, mu_delta);
        int best_pair = 0;
        int best_growth = std::numeric_limits<int>::min();
        for (std::size_t p = 0; p < after.size(); ++p) {
          const int growth = after[p] - before[p];
          if (growth > best_growth) {
            best_growth = growth;
            best_pair = static_cast<int>(p);
          }
        }
        decision.mu_state = best_pair / model.num_actions();
        decision.mu_action = best_pair % model.num_actions();
        decision.mu_before = before[best_pair];
        decision.mu_after = after[best_pair];
      }
      for_each_copy(F, options.parallel,
                    [&](int i) { slots[i] = copies[i].rollout(policy, envs[i]); });
      ++result.rollout_events;
      result.rolled_out[j] = 1;
    }

    auto& outcome_row = result.outcomes[j];
    outcome_row.resize(F);
    for (int i = 0; i < F; ++i)
      outcome_row[i] = slots[i]
                           ? SynthesizedOutcome{false, slots[i]->cumulative_reward}
                           : SynthesizedOutcome{true, 0.0};
    if (options.keep_trajectories) result.trajectories[j] = slots;

    std::uint64_t episodes = 0;
    for (const auto& env : envs) episodes += env.episodes_sampled();
    result.total_episodes = episodes;
    decision.episodes_after = episodes;
    decision.rollout_events_after = result.rollout_events;
    result.gate_log.push_back(decision);
  }
  return result;
}

SimAllResult sim_all(const TabularMDP& model,
                     const std::vector<NonStationaryPolicy>& policies,
                     const SynthesisOptions& options) {
  return sim_all(model, policies, options, [&](int copy) {
    return EnvironmentHandle(model, derive_seed(options.master_seed,
                                                static_cast<std::uint64_t>(copy)));
  });
}

}  // namespace olts
