#include "olts/algorithm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "olts/errors.hpp"
#include "olts/rng.hpp"

namespace olts {

int evaluation_copies(double epsilon, double delta_overall,
                      std::size_t num_policies, double scale) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::invalid_argument("evaluation_copies: epsilon must be in (0, 1)");
  if (!(delta_overall > 0.0 && delta_overall < 1.0))
    throw std::invalid_argument("evaluation_copies: delta must be in (0, 1)");
  if (num_policies == 0)
    throw std::invalid_argument("evaluation_copies: empty policy set");
  const double p = static_cast<double>(num_policies);
  const double raw =
      std::max(64.0 * std::log(4.0 * p / delta_overall) / (epsilon * epsilon),
               192.0 * std::log(2.0 * p / delta_overall) / epsilon);
  return std::max(1, static_cast<int>(std::ceil(scale * raw)));
}

int AlgoConfig::num_copies(std::size_t num_policies) const {
  return evaluation_copies(epsilon, delta_overall, num_policies, scale);
}

namespace {

int argmax_lowest_index(const std::vector<double>& values) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(values.size()); ++i)
    if (values[i] > values[best]) best = i;
  return best;
}

}  // namespace

std::pair<NonStationaryPolicy, EvaluationReport> select_policy(
    EnvironmentHandle& env, const std::vector<NonStationaryPolicy>& policies,
    const AlgoConfig& cfg) {
  if (policies.empty())
    throw std::invalid_argument("select_policy: empty policy set");
  const TabularMDP& model = env.model();
  for (const auto& p : policies)
    if (p.horizon() != model.horizon() || p.num_states() != model.num_states())
      throw std::invalid_argument("select_policy: policy/model size mismatch");

  SynthesisOptions opts;
  opts.delta_sim = cfg.delta_sim();
  opts.num_copies = cfg.num_copies(policies.size());
  opts.scale = cfg.scale;
  opts.master_seed = cfg.seed;
  opts.parallel = cfg.parallel;
  opts.diagnostics = cfg.diagnostics;
  opts.keep_trajectories = false;  // only the scores are needed here

  SimAllResult sim = sim_all(model, policies, opts);

  EvaluationReport report;
  report.epsilon = cfg.epsilon;
  report.delta_overall = cfg.delta_overall;
  report.delta_sim = opts.delta_sim;
  report.scale = cfg.scale;
  report.seed = cfg.seed;
  report.num_copies = opts.num_copies;
  report.tau = sim.tau;
  report.num_policies = policies.size();
  report.rolled_out = sim.rolled_out;
  report.total_episodes = sim.total_episodes;
  report.rollout_events = sim.rollout_events;
  report.gate_log = std::move(sim.gate_log);

  report.empirical_value.resize(policies.size());
  report.fail_count.resize(policies.size());
  for (std::size_t j = 0; j < policies.size(); ++j) {
    double sum = 0.0;
    int fails = 0;
    for (const auto& z : sim.outcomes[j]) {
      sum += z.reward;  // Fail scores 0
      if (z.fail) ++fails;
    }
    report.empirical_value[j] = sum / opts.num_copies;
    report.fail_count[j] = fails;
  }
  report.chosen_index = argmax_lowest_index(report.empirical_value);
  return {policies[report.chosen_index], std::move(report)};
}

std::pair<NonStationaryPolicy, EvaluationReport> select_policy_with_net(
    EnvironmentHandle& env, const AlgoConfig& cfg, GridSpec net_grid,
    const NetBuildOptions& net_options) {
  const TabularMDP& model = env.model();
  try {
    PolicyNet net = build_policy_net(model.num_states(), model.num_actions(),
                                     model.horizon(), net_grid, net_options);
    return select_policy(env, net.policies, cfg);
  } catch (const BudgetExceeded& e) {
    // Report what the accuracy-matched resolution would have needed, for
    // context in logs and error messages.
    const double theoretical_inv =
        32.0 * model.horizon() * model.num_states() / cfg.epsilon;
    const int n_star = static_cast<int>(std::ceil(theoretical_inv));
    DiscretizedMdpGrid star(model.num_states(), model.num_actions(),
                            model.horizon(), GridSpec(std::max(1, n_star)));
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "%s; accuracy-matched resolution 1/%d would need ~10^%.1f "
                  "grid models",
                  e.what(), n_star, star.log10_count());
    throw BudgetExceeded(buf, e.log10_count, e.exact_count);
  }
}

std::pair<NonStationaryPolicy, EvaluationReport> naive_monte_carlo(
    EnvironmentHandle& env, const std::vector<NonStationaryPolicy>& policies,
    int num_episodes_per_policy) {
  if (policies.empty())
    throw std::invalid_argument("naive_monte_carlo: empty policy set");
  if (num_episodes_per_policy < 1)
    throw std::invalid_argument("naive_monte_carlo: need at least one episode");
  const TabularMDP& model = env.model();
  for (const auto& p : policies)
    if (p.horizon() != model.horizon() || p.num_states() != model.num_states())
      throw std::invalid_argument("naive_monte_carlo: policy/model size mismatch");

  EvaluationReport report;
  report.num_copies = num_episodes_per_policy;
  report.num_policies = policies.size();
  report.scale = 1.0;
  report.empirical_value.resize(policies.size());
  report.fail_count.assign(policies.size(), 0);
  report.rolled_out.assign(policies.size(), 1);  // all genuine episodes

  const std::uint64_t before = env.episodes_sampled();
  for (std::size_t j = 0; j < policies.size(); ++j) {
    double sum = 0.0;
    for (int i = 0; i < num_episodes_per_policy; ++i)
      sum += env.sample_episode(policies[j]).cumulative_reward;
    report.empirical_value[j] = sum / num_episodes_per_policy;
  }
  report.total_episodes = env.episodes_sampled() - before;
  report.chosen_index = argmax_lowest_index(report.empirical_value);
  return {policies[report.chosen_index], std::move(report)};
}

std::vector<NonStationaryPolicy> random_policy_set(int num_states,
                                                   int num_actions, int horizon,
                                                   int count,
                                                   std::uint64_t seed) {
  std::vector<NonStationaryPolicy> out;
  out.reserve(count);
  for (int k = 0; k < count; ++k) {
    SplitRng rng(derive_seed(seed, static_cast<std::uint64_t>(k)));
    NonStationaryPolicy p(horizon, num_states, 0);
    for (int h = 0; h < horizon; ++h)
      for (int s = 0; s < num_states; ++s)
        p.set_action(h, s, rng.next_below(num_actions));
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<NonStationaryPolicy> exhaustive_policy_set(int num_states,
                                                       int num_actions,
                                                       int horizon,
                                                       std::uint64_t budget) {
  const std::size_t slots = static_cast<std::size_t>(num_states) * horizon;
  double log10_total = slots * std::log10(static_cast<double>(num_actions));
  std::uint64_t total = 1;
  bool overflow = false;
  for (std::size_t i = 0; i < slots; ++i) {
    if (total > budget) {
      overflow = true;
      break;
    }
    total *= static_cast<std::uint64_t>(num_actions);
  }
  if (overflow || total > budget) {
    char buf[128];
    std::snprintf(buf, sizeof(buf),
                  "exhaustive policy set has ~10^%.1f members; budget is %llu",
                  log10_total, static_cast<unsigned long long>(budget));
    throw BudgetExceeded(buf, log10_total, overflow ? 0 : total);
  }
  std::vector<NonStationaryPolicy> out;
  out.reserve(total);
  NonStationaryPolicy p(horizon, num_states, 0);
  std::vector<int> digits(slots, 0);
  for (std::uint64_t i = 0; i < total; ++i) {
    for (std::size_t d = 0; d < slots; ++d)
      p.set_action(static_cast<int>(d / num_states),
                   static_cast<int>(d % num_states), digits[d]);
    out.push_back(p);
    for (std::size_t d = slots; d-- > 0;) {
      if (++digits[d] < num_actions) break;
      digits[d] = 0;
    }
  }
  return out;
}

}  // namespace olts
