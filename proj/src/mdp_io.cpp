#include "olts/mdp_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "olts/csv.hpp"
#include "olts/errors.hpp"

namespace olts {

namespace {

[[noreturn]] void fail(int line_no, const std::string& what) {
  throw ParseError("line " + std::to_string(line_no) + ": " + what);
}

// Reads lines, skipping blanks and '#' comments, keeping a line counter.
class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  bool next(std::string& out) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      const std::size_t hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      out = line;
      return true;
    }
    return false;
  }

  int line_no() const { return line_no_; }

 private:
  std::istream& in_;
  int line_no_ = 0;
};

double parse_double(const std::string& tok, int line_no) {
  try {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size()) fail(line_no, "bad number '" + tok + "'");
    return v;
  } catch (const ParseError&) {
    throw;
  } catch (...) {
    fail(line_no, "bad number '" + tok + "'");
  }
}

long parse_long(const std::string& tok, int line_no) {
  try {
    std::size_t used = 0;
    const long v = std::stol(tok, &used);
    if (used != tok.size()) fail(line_no, "bad integer '" + tok + "'");
    return v;
  } catch (const ParseError&) {
    throw;
  } catch (...) {
    fail(line_no, "bad integer '" + tok + "'");
  }
}

std::vector<std::string> tokens(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

}  // namespace

TabularMDP load_mdp(std::istream& in) {
  LineReader reader(in);
  std::string line;

  int num_states = -1, num_actions = -1, horizon = -1;
  int fixed_initial = -1;
  std::vector<double> initial_dist;
  bool have_initial = false;
  std::vector<std::vector<double>> transition_rows;
  std::vector<RewardDistribution> reward_rows;

  while (reader.next(line)) {
    const auto toks = tokens(line);
    const int ln = reader.line_no();
    const std::string& key = toks[0];
    if (key == "num_states" || key == "num_actions" || key == "horizon") {
      if (toks.size() != 2) fail(ln, key + " takes one integer");
      const long v = parse_long(toks[1], ln);
      if (v < 1) fail(ln, key + " must be positive");
      (key == "num_states" ? num_states
                           : key == "num_actions" ? num_actions : horizon) =
          static_cast<int>(v);
    } else if (key == "initial") {
      have_initial = true;
      if (toks.size() == 2) {
        fixed_initial = static_cast<int>(parse_long(toks[1], ln));
      } else if (toks.size() >= 3 && toks[1] == "dist") {
        for (std::size_t i = 2; i < toks.size(); ++i)
          initial_dist.push_back(parse_double(toks[i], ln));
      } else {
        fail(ln, "initial takes a state index or 'dist p0 p1 ...'");
      }
    } else if (key == "transition") {
      std::vector<double> row;
      for (std::size_t i = 1; i < toks.size(); ++i)
        row.push_back(parse_double(toks[i], ln));
      transition_rows.push_back(std::move(row));
    } else if (key == "reward") {
      RewardDistribution r;
      for (std::size_t i = 1; i < toks.size(); ++i) {
        const std::size_t colon = toks[i].find(':');
        if (colon == std::string::npos)
          fail(ln, "reward entries are value:probability pairs");
        r.support.push_back(parse_double(toks[i].substr(0, colon), ln));
        r.probability.push_back(parse_double(toks[i].substr(colon + 1), ln));
      }
      reward_rows.push_back(std::move(r));
    } else {
      fail(ln, "unknown key '" + key + "'");
    }
  }

  if (num_states < 1 || num_actions < 1 || horizon < 1)
    throw ParseError("missing num_states/num_actions/horizon");
  if (!have_initial) throw ParseError("missing initial");
  const std::size_t pairs =
      static_cast<std::size_t>(num_states) * num_actions;
  if (transition_rows.size() != pairs)
    throw ParseError("expected " + std::to_string(pairs) +
                     " transition rows, got " +
                     std::to_string(transition_rows.size()));
  if (reward_rows.size() != pairs)
    throw ParseError("expected " + std::to_string(pairs) + " reward rows, got " +
                     std::to_string(reward_rows.size()));

  TabularMDP mdp(num_states, num_actions, horizon);
  for (int s = 0; s < num_states; ++s)
    for (int a = 0; a < num_actions; ++a) {
      const auto& row = transition_rows[s * num_actions + a];
      if (static_cast<int>(row.size()) != num_states)
        throw ParseError("transition row for (s=" + std::to_string(s) +
                         ", a=" + std::to_string(a) + ") has wrong length");
      mdp.set_transition_row(s, a, row);
      mdp.set_reward(s, a, reward_rows[s * num_actions + a]);
    }
  if (fixed_initial >= 0) {
    if (fixed_initial >= num_states) throw ParseError("initial state out of range");
    mdp.set_fixed_initial(fixed_initial);
  } else {
    if (static_cast<int>(initial_dist.size()) != num_states)
      throw ParseError("initial distribution has wrong length");
    mdp.set_initial_distribution(std::move(initial_dist));
  }

  const auto violations = validate(mdp);
  if (!violations.empty()) {
    std::string msg = "model fails validation:";
    for (const auto& v : violations) msg += "\n  " + v;
    throw ParseError(msg);
  }
  return mdp;
}

void save_mdp(const TabularMDP& mdp, std::ostream& out) {
  out << "num_states " << mdp.num_states() << '\n';
  out << "num_actions " << mdp.num_actions() << '\n';
  out << "horizon " << mdp.horizon() << '\n';
  if (mdp.has_fixed_initial()) {
    out << "initial " << mdp.initial_state() << '\n';
  } else {
    out << "initial dist";
    for (double p : mdp.initial_distribution())
      out << ' ' << csv::format_double(p);
    out << '\n';
  }
  for (int s = 0; s < mdp.num_states(); ++s)
    for (int a = 0; a < mdp.num_actions(); ++a) {
      out << "transition";
      for (double p : mdp.transition_row(s, a))
        out << ' ' << csv::format_double(p);
      out << '\n';
    }
  for (int s = 0; s < mdp.num_states(); ++s)
    for (int a = 0; a < mdp.num_actions(); ++a) {
      const auto& r = mdp.reward(s, a);
      out << "reward";
      for (std::size_t i = 0; i < r.support.size(); ++i)
        out << ' ' << csv::format_double(r.support[i]) << ':'
            << csv::format_double(r.probability[i]);
      out << '\n';
    }
}

namespace {

NonStationaryPolicy parse_policy_lines(LineReader& reader, int horizon,
                                       int num_states) {
  NonStationaryPolicy policy(horizon, num_states, 0);
  std::string line;
  for (int h = 0; h < horizon; ++h) {
    if (!reader.next(line))
      throw ParseError("policy: expected " + std::to_string(horizon) +
                       " rows, got " + std::to_string(h));
    const auto toks = tokens(line);
    if (static_cast<int>(toks.size()) != num_states)
      fail(reader.line_no(), "policy row needs " + std::to_string(num_states) +
                                 " actions");
    for (int s = 0; s < num_states; ++s) {
      const long a = parse_long(toks[s], reader.line_no());
      if (a < 0) fail(reader.line_no(), "negative action index");
      policy.set_action(h, s, static_cast<int>(a));
    }
  }
  return policy;
}

}  // namespace

NonStationaryPolicy load_policy(std::istream& in, int horizon, int num_states) {
  LineReader reader(in);
  return parse_policy_lines(reader, horizon, num_states);
}

void save_policy(const NonStationaryPolicy& policy, std::ostream& out) {
  for (int h = 0; h < policy.horizon(); ++h) {
    for (int s = 0; s < policy.num_states(); ++s) {
      if (s) out << ' ';
      out << policy.action(h, s);
    }
    out << '\n';
  }
}

std::vector<NonStationaryPolicy> load_policy_archive(std::istream& in,
                                                     int horizon,
                                                     int num_states) {
  LineReader reader(in);
  std::string line;
  if (!reader.next(line)) throw ParseError("empty policy archive");
  auto toks = tokens(line);
  if (toks.size() != 2 || toks[0] != "policies")
    throw ParseError("policy archive must start with 'policies <count>'");
  const long count = parse_long(toks[1], reader.line_no());
  std::vector<NonStationaryPolicy> out;
  out.reserve(count);
  for (long i = 0; i < count; ++i) {
    if (!reader.next(line) ||
        (toks = tokens(line), toks.size() != 2 || toks[0] != "policy"))
      throw ParseError("expected 'policy " + std::to_string(i) + "' header");
    if (parse_long(toks[1], reader.line_no()) != i)
      fail(reader.line_no(), "policy index out of order");
    out.push_back(parse_policy_lines(reader, horizon, num_states));
  }
  return out;
}

void save_policy_archive(const std::vector<NonStationaryPolicy>& policies,
                         std::ostream& out) {
  out << "policies " << policies.size() << '\n';
  for (std::size_t i = 0; i < policies.size(); ++i) {
    out << "policy " << i << '\n';
    save_policy(policies[i], out);
  }
}

namespace {

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  return in;
}

template <typename Fn>
void write_or_throw(const std::string& path, Fn&& fn) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  fn(out);
}

}  // namespace

TabularMDP load_mdp_file(const std::string& path) {
  auto in = open_or_throw(path);
  return load_mdp(in);
}

void save_mdp_file(const TabularMDP& mdp, const std::string& path) {
  write_or_throw(path, [&](std::ostream& out) { save_mdp(mdp, out); });
}

NonStationaryPolicy load_policy_file(const std::string& path, int horizon,
                                     int num_states) {
  auto in = open_or_throw(path);
  return load_policy(in, horizon, num_states);
}

void save_policy_file(const NonStationaryPolicy& policy,
                      const std::string& path) {
  write_or_throw(path, [&](std::ostream& out) { save_policy(policy, out); });
}

std::vector<NonStationaryPolicy> load_policy_archive_file(
    const std::string& path, int horizon, int num_states) {
  auto in = open_or_throw(path);
  return load_policy_archive(in, horizon, num_states);
}

void save_policy_archive_file(const std::vector<NonStationaryPolicy>& policies,
                              const std::string& path) {
  write_or_throw(path,
                 [&](std::ostream& out) { save_policy_archive(policies, out); });
}

std::vector<NonStationaryPolicy> load_policies_any(const std::string& path,
                                                   int horizon,
                                                   int num_states) {
  {
    auto in = open_or_throw(path);
    LineReader reader(in);
    std::string line;
    if (!reader.next(line)) throw ParseError("empty policy file " + path);
    if (tokens(line)[0] == "policies")
      return load_policy_archive_file(path, horizon, num_states);
  }
  return {load_policy_file(path, horizon, num_states)};
}

}  // namespace olts
