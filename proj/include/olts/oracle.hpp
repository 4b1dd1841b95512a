#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "olts/mdp.hpp"

namespace olts {

// Exact V/Q tables from backward induction. Indexed by 0-based step h.
// Values at inadmissible (s, h) pairs are computed but carry no guarantees.
struct ValueTables {
  int horizon = 0;
  int num_states = 0;
  int num_actions = 0;
  std::vector<double> v;  // h * S + s
  std::vector<double> q;  // (h * S + s) * A + a
  double root_value = 0.0;

  double value(int h, int s) const { return v[h * num_states + s]; }
  double action_value(int h, int s, int a) const {
    return q[(h * num_states + s) * num_actions + a];
  }
};

// Exact expected-value tables for a fixed policy. root_value is V_0(s_init)
// and is only filled in for fixed-initial models.
ValueTables policy_value(const TabularMDP& mdp, const NonStationaryPolicy& policy);

// Backward-induction argmax policy and its (optimal) tables. Ties always
// break to the lowest action index so the result is reproducible.
std::pair<NonStationaryPolicy, ValueTables> optimal_policy(const TabularMDP& mdp);

// States reachable with positive probability at each step under some policy,
// as a forward closure from the initial state. Probabilities are compared
// against zero exactly.
struct AdmissibleSet {
  int horizon = 0;
  int num_states = 0;
  std::vector<std::uint8_t> mask;  // h * S + s

  bool contains(int h, int s) const { return mask[h * num_states + s] != 0; }
  std::size_t count() const;
};

AdmissibleSet admissible_pairs(const TabularMDP& mdp);

// Exact distribution of the number of times one episode of `policy` visits a
// fixed state-action pair. Counts live in {0, ..., H}.
struct VisitCountPmf {
  std::vector<double> probability;  // index = count; size H + 1

  double mean() const;
  double tail(int lambda) const;  // Pr[count >= lambda]
};

VisitCountPmf visit_count_pmf(const TabularMDP& mdp,
                              const NonStationaryPolicy& policy, int s, int a);

// Largest integer count that some policy in `policies` attains at (s, a)
// with probability at least `delta`. Always in [0, H]; 0 when the pair is
// never visited. `policies` must be non-empty and `delta` in (0, 1].
int mu_potential(const TabularMDP& mdp,
                 const std::vector<NonStationaryPolicy>& policies, double delta,
                 int s, int a);

// mu_potential for every pair at once, indexed s * A + a. An empty policy
// set yields all zeros (used by instrumentation before any rollout).
std::vector<int> mu_potential_all(const TabularMDP& mdp,
                                  const std::vector<NonStationaryPolicy>& policies,
                                  double delta);

}  // namespace olts
