#include "olts/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace olts {

double RewardDistribution::sample(SplitRng& rng) const {
  if (support.size() == 1) return support[0];
  return support[sample_categorical(probability, rng)];
}

int sample_categorical(std::span<const double> probs, SplitRng& rng) {
  const double u = rng.next_unit();
  double acc = 0.0;
  int last_positive = -1;
  for (int i = 0; i < static_cast<int>(probs.size()); ++i) {
    const double p = probs[i];
    if (p <= 0.0) continue;
    last_positive = i;
    acc += p;
    if (u < acc) return i;
  }
  if (last_positive < 0)
    throw std::invalid_argument("sample_categorical: no positive entry");
  return last_positive;
}

TabularMDP::TabularMDP(int num_states, int num_actions, int horizon)
    : num_states_(num_states),
      num_actions_(num_actions),
      horizon_(horizon),
      transitions_(
          static_cast<std::size_t>(num_states) * num_actions * num_states,
          0.0),
      rewards_(static_cast<std::size_t>(num_states) * num_actions,
               RewardDistribution::point(0.0)) {
  if (num_states < 1 || num_actions < 1 || horizon < 1)
    throw std::invalid_argument("TabularMDP: sizes must be positive");
}

void TabularMDP::set_transition_row(int s, int a, std::span<const double> row) {
  if (static_cast<int>(row.size()) != num_states_)
    throw std::invalid_argument("set_transition_row: wrong row length");
  std::copy(row.begin(), row.end(),
            transitions_.begin() +
                static_cast<std::size_t>(s * num_actions_ + a) * num_states_);
}

int TabularMDP::initial_state() const {
  if (!has_fixed_initial())
    throw std::logic_error("initial_state: model has a distribution initial");
  return initial_state_;
}

std::span<const double> TabularMDP::initial_distribution() const {
  if (has_fixed_initial())
    throw std::logic_error(
        "initial_distribution: model has a fixed initial state");
  return initial_dist_;
}

void TabularMDP::set_fixed_initial(int s) {
  if (s < 0 || s >= num_states_)
    throw std::invalid_argument("set_fixed_initial: state out of range");
  initial_state_ = s;
  initial_dist_.clear();
}

void TabularMDP::set_initial_distribution(std::vector<double> mu) {
  if (static_cast<int>(mu.size()) != num_states_)
    throw std::invalid_argument("set_initial_distribution: wrong length");
  initial_state_ = -1;
  initial_dist_ = std::move(mu);
}

namespace {

std::string pair_tag(const char* what, int s, int a) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%s (s=%d, a=%d)", what, s, a);
  return buf;
}

bool is_probability_vector(std::span<const double> v, std::string* why) {
  double sum = 0.0;
  for (double p : v) {
    if (!(p >= 0.0)) {  // catches NaN too
      *why = "negative or NaN entry";
      return false;
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kProbSumTolerance) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "sums to %.12g", sum);
    *why = buf;
    return false;
  }
  return true;
}

}  // namespace

std::vector<std::string> validate(const TabularMDP& mdp) {
  std::vector<std::string> violations;
  std::string why;
  for (int s = 0; s < mdp.num_states(); ++s) {
    for (int a = 0; a < mdp.num_actions(); ++a) {
      if (!is_probability_vector(mdp.transition_row(s, a), &why))
        violations.push_back(pair_tag("transition row", s, a) + ": " + why);
      const RewardDistribution& r = mdp.reward(s, a);
      if (r.support.empty() || r.support.size() != r.probability.size()) {
        violations.push_back(pair_tag("reward", s, a) + ": malformed support");
        continue;
      }
      for (double v : r.support)
        if (!(v >= 0.0)) {
          char buf[48];
          std::snprintf(buf, sizeof(buf), "%.12g", v);
          violations.push_back(pair_tag("reward", s, a) +
                               ": negative support value " + buf);
          break;
        }
      if (!is_probability_vector(r.probability, &why))
        violations.push_back(pair_tag("reward probabilities", s, a) + ": " +
                             why);
    }
  }
  if (!mdp.has_fixed_initial()) {
    if (!is_probability_vector(mdp.initial_distribution(), &why))
      violations.push_back("initial distribution: " + why);
  }
  return violations;
}

TabularMDP reduce_initial_distribution(const TabularMDP& mdp) {
  if (mdp.has_fixed_initial())
    throw std::invalid_argument(
        "reduce_initial_distribution: model already has a fixed initial");
  const int s_count = mdp.num_states();
  const int a_count = mdp.num_actions();
  const int entry = s_count;  // appended state

  TabularMDP out(s_count + 1, a_count, mdp.horizon() + 1);
  std::vector<double> row(s_count + 1, 0.0);
  for (int s = 0; s < s_count; ++s) {
    for (int a = 0; a < a_count; ++a) {
      auto src = mdp.transition_row(s, a);
      std::copy(src.begin(), src.end(), row.begin());
      row[entry] = 0.0;
      out.set_transition_row(s, a, row);
      out.set_reward(s, a, mdp.reward(s, a));
    }
  }
  auto mu = mdp.initial_distribution();
  std::copy(mu.begin(), mu.end(), row.begin());
  row[entry] = 0.0;
  for (int a = 0; a < a_count; ++a) {
    out.set_transition_row(entry, a, row);
    out.set_reward(entry, a, RewardDistribution::point(0.0));
  }
  out.set_fixed_initial(entry);
  return out;
}

NonStationaryPolicy lift_policy_for_reduced(const NonStationaryPolicy& policy) {
  NonStationaryPolicy lifted(policy.horizon() + 1, policy.num_states() + 1, 0);
  for (int h = 0; h < policy.horizon(); ++h)
    for (int s = 0; s < policy.num_states(); ++s)
      lifted.set_action(h + 1, s, policy.action(h, s));
  return lifted;
}

}  // namespace olts
