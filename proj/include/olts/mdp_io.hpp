#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "olts/mdp.hpp"

namespace olts {

// Text formats; the grammar lives in docs/formats.md.
//
// Model files: `num_states`, `num_actions`, `horizon`, `initial <s>` or
// `initial dist <p...>`, then one `transition <p...>` line per (s, a) in
// s-major a-minor order and one `reward <v>:<p> ...` line per (s, a) in the
// same order. Values are decimal strings parsed to nearest double. Loading
// rejects any model with validate() violations.
//
// Policy files: H lines of |S| whitespace-separated action indices.
// Archives hold several policies: a `policies <k>` header, then `policy <i>`
// followed by the policy lines, for i = 0..k-1.

TabularMDP load_mdp(std::istream& in);
TabularMDP load_mdp_file(const std::string& path);
void save_mdp(const TabularMDP& mdp, std::ostream& out);
void save_mdp_file(const TabularMDP& mdp, const std::string& path);

NonStationaryPolicy load_policy(std::istream& in, int horizon, int num_states);
NonStationaryPolicy load_policy_file(const std::string& path, int horizon,
                                     int num_states);
void save_policy(const NonStationaryPolicy& policy, std::ostream& out);
void save_policy_file(const NonStationaryPolicy& policy,
                      const std::string& path);

std::vector<NonStationaryPolicy> load_policy_archive(std::istream& in,
                                                     int horizon,
                                                     int num_states);
std::vector<NonStationaryPolicy> load_policy_archive_file(
    const std::string& path, int horizon, int num_states);
void save_policy_archive(const std::vector<NonStationaryPolicy>& policies,
                         std::ostream& out);
void save_policy_archive_file(const std::vector<NonStationaryPolicy>& policies,
                              const std::string& path);

// Loads either a single policy file or an archive, by sniffing the header.
std::vector<NonStationaryPolicy> load_policies_any(const std::string& path,
                                                   int horizon, int num_states);

}  // namespace olts
