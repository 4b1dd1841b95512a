#include "olts/oracle.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace olts {

namespace {

void check_dims(const TabularMDP& mdp, const NonStationaryPolicy& policy) {
  if (policy.horizon() != mdp.horizon() ||
      policy.num_states() != mdp.num_states())
    throw std::invalid_argument("policy/model size mismatch");
}

}  // namespace

ValueTables policy_value(const TabularMDP& mdp,
                         const NonStationaryPolicy& policy) {
  check_dims(mdp, policy);
  const int S = mdp.num_states(), A = mdp.num_actions(), H = mdp.horizon();
  ValueTables t;
  t.horizon = H;
  t.num_states = S;
  t.num_actions = A;
  t.v.assign(static_cast<std::size_t>(H) * S, 0.0);
  t.q.assign(static_cast<std::size_t>(H) * S * A, 0.0);

  std::vector<double> next(S, 0.0);  // V_{h+1}
  for (int h = H - 1; h >= 0; --h) {
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a) {
        double q = mdp.reward(s, a).mean();
        auto row = mdp.transition_row(s, a);
        for (int sn = 0; sn < S; ++sn) q += row[sn] * next[sn];
        t.q[(static_cast<std::size_t>(h) * S + s) * A + a] = q;
      }
      t.v[static_cast<std::size_t>(h) * S + s] =
          t.q[(static_cast<std::size_t>(h) * S + s) * A + policy.action(h, s)];
    }
    std::copy_n(t.v.begin() + static_cast<std::size_t>(h) * S, S, next.begin());
  }
  if (mdp.has_fixed_initial()) t.root_value = t.value(0, mdp.initial_state());
  return t;
}

std::pair<NonStationaryPolicy, ValueTables> optimal_policy(const TabularMDP& mdp) {
  const int S = mdp.num_states(), A = mdp.num_actions(), H = mdp.horizon();
  ValueTables t;
  t.horizon = H;
  t.num_states = S;
  t.num_actions = A;
  t.v.assign(static_cast<std::size_t>(H) * S, 0.0);
  t.q.assign(static_cast<std::size_t>(H) * S * A, 0.0);
  NonStationaryPolicy best(H, S, 0);

  std::vector<double> next(S, 0.0);
  for (int h = H - 1; h >= 0; --h) {
    for (int s = 0; s < S; ++s) {
      double best_q = 0.0;
      int best_a = -1;
      for (int a = 0; a < A; ++a) {
        double q = mdp.reward(s, a).mean();
        auto row = mdp.transition_row(s, a);
        for (int sn = 0; sn < S; ++sn) q += row[sn] * next[sn];
        t.q[(static_cast<std::size_t>(h) * S + s) * A + a] = q;
        if (best_a < 0 || q > best_q) {  // strict >: ties keep the lowest index
          best_q = q;
          best_a = a;
        }
      }
      best.set_action(h, s, best_a);
      t.v[static_cast<std::size_t>(h) * S + s] = best_q;
    }
    std::copy_n(t.v.begin() + static_cast<std::size_t>(h) * S, S, next.begin());
  }
  if (mdp.has_fixed_initial()) t.root_value = t.value(0, mdp.initial_state());
  return {std::move(best), std::move(t)};
}

std::size_t AdmissibleSet::count() const {
  return static_cast<std::size_t>(
      std::count(mask.begin(), mask.end(), std::uint8_t{1}));
}

AdmissibleSet admissible_pairs(const TabularMDP& mdp) {
  const int S = mdp.num_states(), A = mdp.num_actions(), H = mdp.horizon();
  AdmissibleSet adm;
  adm.horizon = H;
  adm.num_states = S;
  adm.mask.assign(static_cast<std::size_t>(H) * S, 0);
  adm.mask[mdp.initial_state()] = 1;
  for (int h = 0; h + 1 < H; ++h) {
    for (int s = 0; s < S; ++s) {
      if (!adm.mask[h * S + s]) continue;
      for (int a = 0; a < A; ++a) {
        auto row = mdp.transition_row(s, a);
        for (int sn = 0; sn < S; ++sn)
          if (row[sn] > 0.0) adm.mask[(h + 1) * S + sn] = 1;
      }
    }
  }
  return adm;
}

double VisitCountPmf::mean() const {
  double m = 0.0;
  for (std::size_t c = 1; c < probability.size(); ++c)
    m += static_cast<double>(c) * probability[c];
  return m;
}

double VisitCountPmf::tail(int lambda) const {
  if (lambda <= 0) return 1.0;
  double t = 0.0;
  for (std::size_t c = static_cast<std::size_t>(lambda);
       c < probability.size(); ++c)
    t += probability[c];
  return t;
}

VisitCountPmf visit_count_pmf(const TabularMDP& mdp,
                              const NonStationaryPolicy& policy, int s, int a) {
  check_dims(mdp, policy);
  const int S = mdp.num_states(), H = mdp.horizon();
  // Forward DP over (state, visits so far); two rolling layers of S x (H+1).
  const std::size_t layer = static_cast<std::size_t>(S) * (H + 1);
  std::vector<double> cur(layer, 0.0), nxt(layer, 0.0);
  cur[static_cast<std::size_t>(mdp.initial_state()) * (H + 1)] = 1.0;

  for (int h = 0; h < H; ++h) {
    std::fill(nxt.begin(), nxt.end(), 0.0);
    for (int st = 0; st < S; ++st) {
      const int act = policy.action(h, st);
      const int bump = (st == s && act == a) ? 1 : 0;
      auto row = mdp.transition_row(st, act);
      for (int c = 0; c <= h; ++c) {
        const double p = cur[static_cast<std::size_t>(st) * (H + 1) + c];
        if (p == 0.0) continue;
        const int c2 = c + bump;
        for (int sn = 0; sn < S; ++sn)
          if (row[sn] > 0.0)
            nxt[static_cast<std::size_t>(sn) * (H + 1) + c2] += p * row[sn];
      }
    }
    cur.swap(nxt);
  }

  VisitCountPmf pmf;
  pmf.probability.assign(H + 1, 0.0);
  for (int st = 0; st < S; ++st)
    for (int c = 0; c <= H; ++c)
      pmf.probability[c] += cur[static_cast<std::size_t>(st) * (H + 1) + c];
  return pmf;
}

int mu_potential(const TabularMDP& mdp,
                 const std::vector<NonStationaryPolicy>& policies, double delta,
                 int s, int a) {
  if (policies.empty())
    throw std::invalid_argument("mu_potential: empty policy set");
  if (!(delta > 0.0 && delta <= 1.0))
    throw std::invalid_argument("mu_potential: delta must be in (0, 1]");
  const int H = mdp.horizon();
  // max over policies of Pr[count >= lambda] is non-increasing in lambda,
  // so take the largest feasible lambda directly.
  std::vector<double> best_tail(H + 1, 0.0);
  for (const auto& policy : policies) {
    VisitCountPmf pmf = visit_count_pmf(mdp, policy, s, a);
    for (int lambda = 0; lambda <= H; ++lambda)
      best_tail[lambda] = std::max(best_tail[lambda], pmf.tail(lambda));
  }
  int mu = 0;
  for (int lambda = H; lambda >= 0; --lambda)
    if (best_tail[lambda] >= delta) {
      mu = lambda;
      break;
    }
  return mu;
}

std::vector<int> mu_potential_all(const TabularMDP& mdp,
                                  const std::vector<NonStationaryPolicy>& policies,
                                  double delta) {
  const int S = mdp.num_states(), A = mdp.num_actions();
  std::vector<int> mu(static_cast<std::size_t>(S) * A, 0);
  if (policies.empty()) return mu;
  for (int s = 0; s < S; ++s)
    for (int a = 0; a < A; ++a)
      mu[s * A + a] = mu_potential(mdp, policies, delta, s, a);
  return mu;
}

}  // namespace olts
