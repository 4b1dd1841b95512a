#include "olts/policy_net.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <unordered_map>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "olts/errors.hpp"
#include "olts/oracle.hpp"

namespace olts {

GridSpec::GridSpec(int n) : inverse_resolution(n) {
  if (n < 1) throw std::invalid_argument("GridSpec: 1/eps must be >= 1");
}

GridSpec GridSpec::from_accuracy(double eps) {
  if (!(eps > 0.0) || eps > 1.0)
    throw std::invalid_argument("GridSpec::from_accuracy: eps must be in (0, 1]");
  return GridSpec(static_cast<int>(std::ceil(1.0 / eps)));
}

TabularMDP DiscretizedMDP::to_tabular() const {
  TabularMDP out(num_states, num_actions, horizon);
  const double n = grid_n;
  std::vector<double> row(num_states);
  for (int s = 0; s < num_states; ++s) {
    for (int a = 0; a < num_actions; ++a) {
      const int* nums = transition_num.data() +
                        static_cast<std::size_t>(s * num_actions + a) * num_states;
      for (int sn = 0; sn < num_states; ++sn) row[sn] = nums[sn] / n;
      out.set_transition_row(s, a, row);
      out.set_reward(s, a,
                     RewardDistribution::point(reward_num[s * num_actions + a] / n));
    }
  }
  out.set_fixed_initial(initial_state);
  return out;
}

namespace grid_detail {

std::uint64_t composition_count(int total, int parts) {
  // C(total + parts - 1, parts - 1); overflow-checked.
  std::uint64_t r = 1;
  for (int i = 1; i <= parts - 1; ++i) {
    const std::uint64_t num = static_cast<std::uint64_t>(total + i);
    if (r > std::numeric_limits<std::uint64_t>::max() / num)
      throw BudgetExceeded("composition count overflows 64 bits",
                           std::numeric_limits<double>::infinity(), 0);
    r = r * num / i;  // exact: r is always an integer binomial prefix
  }
  return r;
}

void first_composition(int total, std::span<int> out) {
  std::fill(out.begin(), out.end(), 0);
  out.back() = total;
}

bool next_composition(std::span<int> comp) {
  // Lexicographic successor: move one unit left from the last positive
  // part; everything after collapses onto the final slot.
  int r = static_cast<int>(comp.size()) - 1;
  while (r >= 0 && comp[r] == 0) --r;
  if (r <= 0) return false;
  const int moved = comp[r];
  comp[r] = 0;
  comp[r - 1] += 1;
  comp[comp.size() - 1] = moved - 1;
  return true;
}

void unrank_composition(int total, int parts, std::uint64_t rank,
                        std::span<int> out) {
  for (int i = 0; i < parts - 1; ++i) {
    int v = 0;
    for (;; ++v) {
      const std::uint64_t block = composition_count(total - v, parts - 1 - i);
      if (rank < block) break;
      rank -= block;
    }
    out[i] = v;
    total -= v;
  }
  out[parts - 1] = total;
}

}  // namespace grid_detail

DiscretizedMdpGrid::DiscretizedMdpGrid(int num_states, int num_actions,
                                       int horizon, GridSpec grid,
                                       int initial_state)
    : num_states_(num_states),
      num_actions_(num_actions),
      horizon_(horizon),
      grid_(grid),
      initial_state_(initial_state),
      compositions_per_row_(
          grid_detail::composition_count(grid.inverse_resolution, num_states)) {
  if (num_states < 1 || num_actions < 1 || horizon < 1)
    throw std::invalid_argument("DiscretizedMdpGrid: sizes must be positive");
}

std::uint64_t DiscretizedMdpGrid::total_count() const {
  const int pairs = num_states_ * num_actions_;
  const std::uint64_t reward_choices = grid_.inverse_resolution + 1;
  std::uint64_t count = 1;
  auto mul = [&count, this](std::uint64_t f) {
    if (count > std::numeric_limits<std::uint64_t>::max() / f)
      throw BudgetExceeded("grid family count overflows 64 bits",
                           log10_count(), 0);
    count *= f;
  };
  for (int i = 0; i < pairs; ++i) mul(reward_choices);
  for (int i = 0; i < pairs; ++i) mul(compositions_per_row_);
  return count;
}

double DiscretizedMdpGrid::log10_count() const {
  const int pairs = num_states_ * num_actions_;
  const int n = grid_.inverse_resolution;
  // log10 C(n+S-1, S-1) via lgamma.
  const double log_comp =
      (std::lgamma(n + num_states_) - std::lgamma(n + 1.0) -
       std::lgamma(static_cast<double>(num_states_))) /
      std::log(10.0);
  return pairs * std::log10(n + 1.0) + pairs * log_comp;
}

double DiscretizedMdpGrid::log10_count_bound() const {
  const double exponent =
      static_cast<double>(num_states_) * num_states_ * num_actions_ +
      static_cast<double>(num_states_) * num_actions_;
  return exponent * std::log10(grid_.inverse_resolution + 1.0);
}

DiscretizedMDP DiscretizedMdpGrid::decode(std::uint64_t index) const {
  const int S = num_states_, A = num_actions_;
  const int pairs = S * A;
  DiscretizedMDP m;
  m.num_states = S;
  m.num_actions = A;
  m.horizon = horizon_;
  m.grid_n = grid_.inverse_resolution;
  m.initial_state = initial_state_;
  m.reward_num.assign(pairs, 0);
  m.transition_num.assign(static_cast<std::size_t>(pairs) * S, 0);

  // Mixed radix, transition slots fastest (last), rewards slowest.
  for (int p = pairs - 1; p >= 0; --p) {
    const std::uint64_t digit = index % compositions_per_row_;
    index /= compositions_per_row_;
    grid_detail::unrank_composition(
        grid_.inverse_resolution, S, digit,
        std::span<int>(m.transition_num.data() + static_cast<std::size_t>(p) * S,
                       S));
  }
  const std::uint64_t reward_choices = grid_.inverse_resolution + 1;
  for (int p = pairs - 1; p >= 0; --p) {
    m.reward_num[p] = static_cast<int>(index % reward_choices);
    index /= reward_choices;
  }
  return m;
}

bool DiscretizedMdpGrid::advance(DiscretizedMDP& m) const {
  const int S = num_states_;
  const int pairs = S * num_actions_;
  // Odometer: transition rows (fastest) then reward digits.
  for (int p = pairs - 1; p >= 0; --p) {
    std::span<int> row(m.transition_num.data() + static_cast<std::size_t>(p) * S,
                       S);
    if (grid_detail::next_composition(row)) return true;
    grid_detail::first_composition(grid_.inverse_resolution, row);
  }
  for (int p = pairs - 1; p >= 0; --p) {
    if (m.reward_num[p] < grid_.inverse_resolution) {
      ++m.reward_num[p];
      return true;
    }
    m.reward_num[p] = 0;
  }
  return false;
}

DiscretizedMdpGrid::Cursor::Cursor(const DiscretizedMdpGrid& grid)
    : grid_(&grid), current_(grid.decode(0)) {}

bool DiscretizedMdpGrid::Cursor::next(DiscretizedMDP& out) {
  if (exhausted_) return false;
  out = current_;
  exhausted_ = !grid_->advance(current_);
  return true;
}

DiscretizedMDP round_to_grid(const TabularMDP& mdp, GridSpec grid) {
  if (!mdp.has_fixed_initial())
    throw std::invalid_argument("round_to_grid: model needs a fixed initial");
  const int S = mdp.num_states(), A = mdp.num_actions();
  const int n = grid.inverse_resolution;
  // Snap tolerance so that grid-valued doubles are exact fixed points.
  const double snap = 1e-9;

  DiscretizedMDP out;
  out.num_states = S;
  out.num_actions = A;
  out.horizon = mdp.horizon();
  out.grid_n = n;
  out.initial_state = mdp.initial_state();
  out.reward_num.assign(static_cast<std::size_t>(S) * A, 0);
  out.transition_num.assign(static_cast<std::size_t>(S) * A * S, 0);

  for (int s = 0; s < S; ++s) {
    for (int a = 0; a < A; ++a) {
      // Reward: nearest grid point, exact halves down; clamp covers
      // expectations outside [0, 1] at unreachable pairs.
      const double x = mdp.reward(s, a).mean() * n;
      const double nearest = std::nearbyint(x);
      int k;
      if (std::abs(x - nearest) <= snap) {
        k = static_cast<int>(nearest);
      } else {
        const double lo = std::floor(x);
        k = static_cast<int>(lo) + ((x - lo > 0.5) ? 1 : 0);
      }
      out.reward_num[s * A + a] = std::clamp(k, 0, n);

      // Transitions: raise each entry to the smallest grid numerator >= p*n,
      // then drain the surplus from the lowest-indexed positive successors.
      auto row = mdp.transition_row(s, a);
      int* nums =
          out.transition_num.data() + static_cast<std::size_t>(s * A + a) * S;
      long long total = 0;
      for (int sn = 0; sn < S; ++sn) {
        const double y = row[sn] * n;
        const double near = std::nearbyint(y);
        const int c = (std::abs(y - near) <= snap) ? static_cast<int>(near)
                                                   : static_cast<int>(std::ceil(y));
        nums[sn] = c;
        total += c;
      }
      long long surplus = total - n;
      if (surplus < 0)
        throw std::logic_error("round_to_grid: row rounded below 1");
      for (int sn = 0; sn < S && surplus > 0; ++sn) {
        if (row[sn] > 0.0 && nums[sn] >= 1) {
          nums[sn] -= 1;
          --surplus;
        }
      }
      if (surplus != 0)
        throw std::logic_error(
            "round_to_grid: surplus exceeds positive successors");
    }
  }
  return out;
}

bool PolicyNet::contains(const NonStationaryPolicy& policy) const {
  return std::find(policies.begin(), policies.end(), policy) != policies.end();
}

namespace {

struct TableHash {
  std::size_t operator()(const std::vector<int>& v) const {
    std::size_t h = 1469598103934665603ull;  // FNV-1a
    for (int x : v) {
      h ^= static_cast<std::size_t>(x) + 0x9e3779b97f4a7c15ull;
      h *= 1099511628211ull;
    }
    return h;
  }
};

struct NetEntry {
  std::uint64_t first_index;
  std::uint64_t count;
};

using NetMap = std::unordered_map<std::vector<int>, NetEntry, TableHash>;

// Optimal policy of a grid model, without materializing a TabularMDP.
// Matches optimal_policy() bit for bit: probabilities are formed by the same
// division, accumulated in the same successor order, ties to lowest action.
void solve_grid(const DiscretizedMDP& m, std::vector<double>& v_next,
                std::vector<double>& v_cur, std::vector<int>& policy_table) {
  const int S = m.num_states, A = m.num_actions, H = m.horizon;
  const double n = m.grid_n;
  std::fill(v_next.begin(), v_next.end(), 0.0);
  for (int h = H - 1; h >= 0; --h) {
    for (int s = 0; s < S; ++s) {
      double best_q = 0.0;
      int best_a = -1;
      for (int a = 0; a < A; ++a) {
        const int* nums = m.transition_num.data() +
                          static_cast<std::size_t>(s * A + a) * S;
        double q = m.reward_num[s * A + a] / n;
        for (int sn = 0; sn < S; ++sn) q += (nums[sn] / n) * v_next[sn];
        if (best_a < 0 || q > best_q) {
          best_q = q;
          best_a = a;
        }
      }
      policy_table[h * S + s] = best_a;
      v_cur[s] = best_q;
    }
    v_cur.swap(v_next);
  }
}

void merge_entry(NetMap& into, const std::vector<int>& key, NetEntry entry) {
  auto [it, inserted] = into.emplace(key, entry);
  if (!inserted) {
    it->second.count += entry.count;
    it->second.first_index = std::min(it->second.first_index, entry.first_index);
  }
}

PolicyNet net_from_map(int S, int A, int H, GridSpec grid, std::uint64_t total,
                       NetMap&& map) {
  std::vector<std::pair<std::vector<int>, NetEntry>> entries(
      std::make_move_iterator(map.begin()), std::make_move_iterator(map.end()));
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    return a.second.first_index < b.second.first_index;
  });
  PolicyNet net;
  net.num_states = S;
  net.num_actions = A;
  net.horizon = H;
  net.grid_n = grid.inverse_resolution;
  net.enumerated_count = total;
  net.policies.reserve(entries.size());
  for (auto& [table, entry] : entries) {
    NonStationaryPolicy p(H, S, 0);
    for (int h = 0; h < H; ++h)
      for (int s = 0; s < S; ++s) p.set_action(h, s, table[h * S + s]);
    net.policies.push_back(std::move(p));
    net.first_producer.push_back(entry.first_index);
    net.producer_count.push_back(entry.count);
  }
  return net;
}

}  // namespace

PolicyNet build_policy_net(int num_states, int num_actions, int horizon,
                           GridSpec grid, const NetBuildOptions& options) {
  DiscretizedMdpGrid family(num_states, num_actions, horizon, grid);
  std::uint64_t total;
  try {
    total = family.total_count();
  } catch (const BudgetExceeded&) {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "policy net needs ~10^%.1f grid models; budget is %llu",
                  family.log10_count(),
                  static_cast<unsigned long long>(options.budget));
    throw BudgetExceeded(buf, family.log10_count(), 0);
  }
  if (total > options.budget) {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "policy net needs %llu grid models; budget is %llu",
                  static_cast<unsigned long long>(total),
                  static_cast<unsigned long long>(options.budget));
    throw BudgetExceeded(buf, family.log10_count(), total);
  }

  const int S = num_states, A = num_actions, H = horizon;
  NetMap merged;

  if (!options.parallel) {
    // Serial reference path: stream the canonical order.
    std::vector<double> v_next(S), v_cur(S);
    std::vector<int> table(static_cast<std::size_t>(H) * S);
    DiscretizedMDP m;
    auto cur = family.cursor();
    std::uint64_t index = 0;
    while (cur.next(m)) {
      solve_grid(m, v_next, v_cur, table);
      merge_entry(merged, table, {index, 1});
      ++index;
    }
  } else {
    const std::uint64_t chunk = std::max<std::uint64_t>(1, options.chunk);
    const std::uint64_t num_chunks = (total + chunk - 1) / chunk;
#pragma omp parallel
    {
      NetMap local;
      std::vector<double> v_next(S), v_cur(S);
      std::vector<int> table(static_cast<std::size_t>(H) * S);
#pragma omp for schedule(dynamic)
      for (std::int64_t c = 0; c < static_cast<std::int64_t>(num_chunks); ++c) {
        const std::uint64_t begin = static_cast<std::uint64_t>(c) * chunk;
        const std::uint64_t end = std::min(total, begin + chunk);
        // Decode once per chunk, then walk the odometer.
        DiscretizedMDP m = family.decode(begin);
        for (std::uint64_t index = begin; index < end; ++index) {
          solve_grid(m, v_next, v_cur, table);
          merge_entry(local, table, {index, 1});
          if (index + 1 < end) family.advance(m);
        }
      }
#pragma omp critical
      for (auto& [key, entry] : local) merge_entry(merged, key, entry);
    }
  }
  return net_from_map(S, A, H, grid, total, std::move(merged));
}

double perturbation_gap(const TabularMDP& mdp, GridSpec grid,
                        const NonStationaryPolicy& policy) {
  const TabularMDP rounded = round_to_grid(mdp, grid).to_tabular();
  const ValueTables exact = policy_value(mdp, policy);
  const ValueTables approx = policy_value(rounded, policy);
  const AdmissibleSet adm = admissible_pairs(mdp);
  double gap = 0.0;
  for (int h = 0; h < mdp.horizon(); ++h)
    for (int s = 0; s < mdp.num_states(); ++s)
      if (adm.contains(h, s))
        gap = std::max(gap, std::abs(exact.value(h, s) - approx.value(h, s)));
  return gap;
}

}  // namespace olts
