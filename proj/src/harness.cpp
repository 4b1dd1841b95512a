#include "olts/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <unordered_map>

#include "olts/env.hpp"
#include "olts/oracle.hpp"
#include "olts/rng.hpp"
#include "olts/synthesis.hpp"

namespace olts::harness {

const Thresholds& thresholds() {
  static const Thresholds t{};
  return t;
}

TabularMDP random_mdp(int num_states, int num_actions, int horizon,
                      std::uint64_t seed, const MdpGenOptions& options) {
  SplitRng rng(seed);
  TabularMDP mdp(num_states, num_actions, horizon);

  std::vector<double> row(num_states);
  for (int s = 0; s < num_states; ++s)
    for (int a = 0; a < num_actions; ++a) {
      double sum = 0.0;
      int keep = rng.next_below(num_states);  // always-positive entry
      for (int sn = 0; sn < num_states; ++sn) {
        double w = 0.05 + rng.next_unit();
        if (options.transition_sparsity > 0.0 && sn != keep &&
            rng.next_unit() < options.transition_sparsity)
          w = 0.0;
        row[sn] = w;
        sum += w;
      }
      for (int sn = 0; sn < num_states; ++sn) row[sn] /= sum;
      mdp.set_transition_row(s, a, row);
    }

  // Deterministic rewards, scaled so any episode's sum stays within 1.
  std::vector<double> raw(static_cast<std::size_t>(num_states) * num_actions);
  double max_raw = 0.0;
  for (auto& r : raw) {
    const double u = rng.next_unit();
    r = u * u;
    max_raw = std::max(max_raw, r);
  }
  const double scale = 1.0 / (horizon * std::max(max_raw, 1e-12));
  for (int s = 0; s < num_states; ++s)
    for (int a = 0; a < num_actions; ++a)
      mdp.set_reward(s, a,
                     RewardDistribution::point(raw[s * num_actions + a] * scale));

  mdp.set_fixed_initial(0);
  return mdp;
}

NonStationaryPolicy random_policy(int num_states, int num_actions, int horizon,
                                  std::uint64_t seed) {
  SplitRng rng(seed);
  NonStationaryPolicy p(horizon, num_states, 0);
  for (int h = 0; h < horizon; ++h)
    for (int s = 0; s < num_states; ++s)
      p.set_action(h, s, rng.next_below(num_actions));
  return p;
}

namespace {

// Sub-stream ids for the seeded batteries.
constexpr std::uint64_t kMdpStream = 0xB1;
constexpr std::uint64_t kPolicyStream = 0xB2;
constexpr std::uint64_t kAlgoStream = 0xB3;
constexpr std::uint64_t kEnvStream = 0xB4;

std::string trajectory_key(const Trajectory& traj) {
  // Raw-byte encoding; rewards come from finite supports so equal samples
  // are bitwise equal.
  std::string key;
  key.reserve(traj.steps.size() * (2 * sizeof(int) + sizeof(double)) +
              sizeof(int));
  auto put = [&key](const void* p, std::size_t n) {
    key.append(static_cast<const char*>(p), n);
  };
  for (const auto& step : traj.steps) {
    put(&step.state, sizeof(step.state));
    put(&step.action, sizeof(step.action));
    put(&step.reward, sizeof(step.reward));
  }
  put(&traj.terminal_state, sizeof(traj.terminal_state));
  return key;
}

using CountMap = std::unordered_map<std::string, std::pair<std::uint64_t, std::uint64_t>>;

double total_variation(const CountMap& counts, double norm_a, double norm_b) {
  double tv = 0.0;
  for (const auto& [key, c] : counts)
    tv += std::abs(c.first / norm_a - c.second / norm_b);
  return 0.5 * tv;
}

struct MarginalCounts {
  // counts[h * S + s], h = 0..H (H holds the terminal state).
  std::vector<std::uint64_t> synth, reference;
};

}  // namespace

std::vector<StatTestResult> fidelity_test(const TabularMDP& mdp,
                                          const NonStationaryPolicy& fill,
                                          const NonStationaryPolicy& test,
                                          const FidelityOptions& options) {
  const int S = mdp.num_states(), H = mdp.horizon();
  BinningMode mode = options.binning;
  const bool small_instance =
      H <= options.full_bin_max_horizon && S <= options.full_bin_max_states;
  if (mode == BinningMode::kAuto)
    mode = small_instance ? BinningMode::kFullTrajectory
                          : BinningMode::kStepMarginals;
  if (mode == BinningMode::kFullTrajectory && !small_instance)
    throw std::invalid_argument(
        "fidelity_test: trajectory space above the enumeration cap; "
        "use step marginals");

  const int tau = synthesis_repetitions(S, mdp.num_actions(), options.delta_sim,
                                        options.scale);
  const int N = options.samples;

  CountMap full_counts;
  MarginalCounts marg;
  marg.synth.assign(static_cast<std::size_t>(H + 1) * S, 0);
  marg.reference.assign(static_cast<std::size_t>(H + 1) * S, 0);
  std::uint64_t fails = 0;

  const int num_threads_hint = options.parallel ? 0 : 1;
  (void)num_threads_hint;

#pragma omp parallel if (options.parallel)
  {
    CountMap local_counts;
    std::vector<std::uint64_t> local_synth(marg.synth.size(), 0);
    std::vector<std::uint64_t> local_ref(marg.reference.size(), 0);
    std::uint64_t local_fails = 0;

#pragma omp for schedule(static)
    for (int rep = 0; rep < N; ++rep) {
      // Each repetition is a pure function of its derived seeds, so thread
      // count and schedule cannot change the totals.
      const std::uint64_t rep_seed =
          derive_seed(options.seed, static_cast<std::uint64_t>(rep));
      TrajectorySynthesizer synth(mdp, tau,
                                  static_cast<std::size_t>(mdp.horizon()));
      EnvironmentHandle fill_env(mdp, derive_seed(rep_seed, 0));
      synth.rollout(fill, fill_env);
      const auto simulated = synth.simulate(test);

      EnvironmentHandle ref_env(mdp, derive_seed(rep_seed, 1));
      const Trajectory reference = ref_env.sample_episode(test);

      if (mode == BinningMode::kFullTrajectory) {
        if (simulated)
          local_counts[trajectory_key(*simulated)].first += 1;
        else
          ++local_fails;
        local_counts[trajectory_key(reference)].second += 1;
      } else {
        if (simulated) {
          for (int h = 0; h < H; ++h)
            ++local_synth[static_cast<std::size_t>(h) * S +
                          simulated->steps[h].state];
          ++local_synth[static_cast<std::size_t>(H) * S +
                        simulated->terminal_state];
        } else {
          ++local_fails;
        }
        for (int h = 0; h < H; ++h)
          ++local_ref[static_cast<std::size_t>(h) * S +
                      reference.steps[h].state];
        ++local_ref[static_cast<std::size_t>(H) * S + reference.terminal_state];
      }
    }

#pragma omp critical
    {
      fails += local_fails;
      if (mode == BinningMode::kFullTrajectory) {
        for (auto& [key, c] : local_counts) {
          auto& dst = full_counts[key];
          dst.first += c.first;
          dst.second += c.second;
        }
      } else {
        for (std::size_t i = 0; i < marg.synth.size(); ++i) {
          marg.synth[i] += local_synth[i];
          marg.reference[i] += local_ref[i];
        }
      }
    }
  }

  const std::uint64_t non_fail = static_cast<std::uint64_t>(N) - fails;
  double tv = 0.0;
  std::string tv_name;
  if (mode == BinningMode::kFullTrajectory) {
    tv_name = "total-variation";
    if (non_fail > 0)
      tv = total_variation(full_counts, static_cast<double>(non_fail),
                           static_cast<double>(N));
    else
      tv = 1.0;
  } else {
    tv_name = "total-variation-marginal";
    for (int h = 0; h <= H; ++h) {
      double step_tv = 0.0;
      for (int s = 0; s < S; ++s) {
        const double p =
            non_fail ? marg.synth[static_cast<std::size_t>(h) * S + s] /
                           static_cast<double>(non_fail)
                     : 0.0;
        const double q = marg.reference[static_cast<std::size_t>(h) * S + s] /
                         static_cast<double>(N);
        step_tv += std::abs(p - q);
      }
      tv = std::max(tv, 0.5 * step_tv);
    }
    if (non_fail == 0) tv = 1.0;
  }

  const Thresholds& th = thresholds();
  std::vector<StatTestResult> results;
  results.push_back({tv_name, tv, th.fidelity_tv_max, tv <= th.fidelity_tv_max,
                     static_cast<std::uint64_t>(N), non_fail});
  const double fail_rate = static_cast<double>(fails) / N;
  const double fail_threshold = 2.0 * options.delta_sim + th.fidelity_fail_margin;
  results.push_back({"fail-frequency", fail_rate, fail_threshold,
                     fail_rate <= fail_threshold, static_cast<std::uint64_t>(N),
                     fails});
  return results;
}

std::string algo_name(Algo algo) {
  return algo == Algo::kSynthesis ? "olts" : "naive";
}

std::string axis_name(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kHorizon: return "horizon";
    case SweepAxis::kPolicyCount: return "policy_count";
    case SweepAxis::kEpsilon: return "epsilon";
  }
  return "?";
}

PointResult run_point(const PointSpec& spec) {
  MdpGenOptions gen;
  gen.transition_sparsity = spec.transition_sparsity;
  const TabularMDP mdp =
      random_mdp(spec.num_states, spec.num_actions, spec.horizon,
                 derive_seed(spec.seed, kMdpStream), gen);

  auto [optimal, optimal_tables] = optimal_policy(mdp);
  std::vector<NonStationaryPolicy> policies =
      random_policy_set(spec.num_states, spec.num_actions, spec.horizon,
                        spec.policy_count - 1, derive_seed(spec.seed, kPolicyStream));
  policies.push_back(optimal);

  EnvironmentHandle env(mdp, derive_seed(spec.seed, kEnvStream));

  PointResult out;
  const auto start = std::chrono::steady_clock::now();
  if (spec.algo == Algo::kSynthesis) {
    AlgoConfig cfg;
    cfg.epsilon = spec.epsilon;
    cfg.delta_overall = spec.delta_overall;
    cfg.scale = spec.scale;
    cfg.seed = derive_seed(spec.seed, kAlgoStream);
    cfg.parallel = spec.parallel;
    auto [chosen, report] = select_policy(env, policies, cfg);
    out.report = std::move(report);
    out.chosen_value = policy_value(mdp, chosen).root_value;
  } else {
    const int copies = evaluation_copies(spec.epsilon, spec.delta_overall,
                                         policies.size(), spec.scale);
    auto [chosen, report] = naive_monte_carlo(env, policies, copies);
    report.epsilon = spec.epsilon;
    report.delta_overall = spec.delta_overall;
    report.delta_sim = spec.epsilon / 8.0;
    report.scale = spec.scale;
    report.seed = derive_seed(spec.seed, kAlgoStream);
    out.report = std::move(report);
    out.chosen_value = policy_value(mdp, chosen).root_value;
  }
  const auto stop = std::chrono::steady_clock::now();
  out.wall_ms =
      std::chrono::duration<double, std::milli>(stop - start).count();
  out.optimal_value = optimal_tables.root_value;
  out.suboptimality = out.optimal_value - out.chosen_value;
  return out;
}

std::vector<std::string> sweep_columns(bool timing) {
  std::vector<std::string> cols = {
      "axis",          "axis_value",  "rep",          "algo",
      "seed",          "num_states",  "num_actions",  "horizon",
      "policy_count",  "epsilon",     "delta",        "scale",
      "copies",        "tau",         "episodes",     "rollout_events",
      "chosen_index",  "chosen_value", "optimal_value", "suboptimality"};
  if (timing) cols.push_back("wall_ms");
  return cols;
}

csv::Table point_row_table(const PointSpec& spec, const PointResult& result,
                           SweepAxis axis, double axis_value, int rep,
                           bool timing) {
  csv::Table t;
  t.columns = sweep_columns(timing);
  std::vector<std::string> row = {
      axis_name(axis),
      csv::format_double(axis_value),
      csv::format_int(rep),
      algo_name(spec.algo),
      csv::format_u64(spec.seed),
      csv::format_int(spec.num_states),
      csv::format_int(spec.num_actions),
      csv::format_int(spec.horizon),
      csv::format_int(spec.policy_count),
      csv::format_double(spec.epsilon),
      csv::format_double(spec.delta_overall),
      csv::format_double(spec.scale),
      csv::format_int(result.report.num_copies),
      csv::format_int(result.report.tau),
      csv::format_u64(result.report.total_episodes),
      csv::format_int(result.report.rollout_events),
      csv::format_int(result.report.chosen_index),
      csv::format_double(result.chosen_value),
      csv::format_double(result.optimal_value),
      csv::format_double(result.suboptimality)};
  if (timing) row.push_back(csv::format_double(result.wall_ms));
  t.add_row(std::move(row));
  return t;
}

csv::Table run_sweep(const SweepSpec& spec) {
  if (spec.values.empty())
    throw std::invalid_argument("run_sweep: no axis values");
  for (std::size_t i = 1; i < spec.values.size(); ++i)
    if (!(spec.values[i] > spec.values[i - 1]))
      throw std::invalid_argument("run_sweep: axis values must be increasing");
  if (spec.repetitions < 1)
    throw std::invalid_argument("run_sweep: repetitions must be >= 1");

  csv::Table table;
  table.columns = sweep_columns(spec.timing);
  for (std::size_t i = 0; i < spec.values.size(); ++i) {
    const double value = spec.values[i];
    for (int rep = 0; rep < spec.repetitions; ++rep) {
      // The battery depends on (axis point, rep) only, never the algorithm,
      // so head-to-head rows share models and policy sets.
      const std::uint64_t point_seed = derive_seed(
          derive_seed(spec.base_seed, static_cast<std::uint64_t>(i)),
          static_cast<std::uint64_t>(rep));
      for (Algo algo : spec.algorithms) {
        PointSpec point = spec.base;
        point.algo = algo;
        point.seed = point_seed;
        switch (spec.axis) {
          case SweepAxis::kHorizon:
            point.horizon = static_cast<int>(value);
            break;
          case SweepAxis::kPolicyCount:
            point.policy_count = static_cast<int>(value);
            break;
          case SweepAxis::kEpsilon:
            point.epsilon = value;
            break;
        }
        const PointResult result = run_point(point);
        csv::Table one =
            point_row_table(point, result, spec.axis, value, rep, spec.timing);
        table.add_row(one.rows[0]);
      }
    }
  }
  return table;
}

std::pair<std::string, std::string> emit_report(
    const csv::Table& table, const std::vector<std::string>& meta_lines,
    const std::string& out_dir, const std::string& stem) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const std::string csv_path = (fs::path(out_dir) / (stem + ".csv")).string();
  const std::string summary_path =
      (fs::path(out_dir) / (stem + "_summary.txt")).string();

  {
    std::ofstream out(csv_path);
    if (!out) throw std::runtime_error("cannot write " + csv_path);
    csv::write(table, out);
  }
  {
    std::ofstream out(summary_path);
    if (!out) throw std::runtime_error("cannot write " + summary_path);
    for (const auto& line : meta_lines) out << line << '\n';
    if (table.rows.empty()) {
      out << "no data\n";
    } else {
      out << "rows " << table.rows.size() << '\n';
      const int axis_col = table.column_index("axis_value");
      const int algo_col = table.column_index("algo");
      const int episodes_col = table.column_index("episodes");
      const int subopt_col = table.column_index("suboptimality");
      if (axis_col >= 0 && algo_col >= 0 && episodes_col >= 0 &&
          subopt_col >= 0) {
        // Group means in first-appearance order.
        std::vector<std::string> keys;
        std::unordered_map<std::string, std::pair<double, double>> sums;
        std::unordered_map<std::string, int> counts;
        for (const auto& row : table.rows) {
          const std::string key = row[algo_col] + " @ " + row[axis_col];
          if (!counts.count(key)) keys.push_back(key);
          sums[key].first += std::stod(row[episodes_col]);
          sums[key].second += std::stod(row[subopt_col]);
          counts[key] += 1;
        }
        for (const auto& key : keys) {
          const int n = counts[key];
          out << key << ": mean_episodes "
              << csv::format_double(sums[key].first / n) << " mean_suboptimality "
              << csv::format_double(sums[key].second / n) << '\n';
        }
      }
    }
  }
  return {csv_path, summary_path};
}

csv::Table stat_results_table(const std::vector<StatTestResult>& results) {
  csv::Table t;
  t.columns = {"name", "statistic", "threshold", "pass", "sample_a", "sample_b"};
  for (const auto& r : results)
    t.add_row({r.name, csv::format_double(r.statistic),
               csv::format_double(r.threshold), r.pass ? "1" : "0",
               csv::format_u64(r.sample_a), csv::format_u64(r.sample_b)});
  return t;
}

}  // namespace olts::harness
