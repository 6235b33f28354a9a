#pragma once

// Helpers shared by the test programs: small posets built by hand and
// brute-force references that do not go through the library's algorithms.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <sys/wait.h>

#include "gkahn/gkahn.hpp"

namespace support {

using gkahn::ElementId;
using gkahn::FinitePointedPoset;

/// Words over `alphabet` of length <= depth with the prefix order, built
/// from an explicit list of pairs.
inline FinitePointedPoset prefix_poset(const std::string& alphabet, std::size_t depth) {
  std::vector<std::string> words{""};
  for (std::size_t i = 0; i < words.size(); ++i)
    if (words[i].size() < depth)
      for (char c : alphabet) words.push_back(words[i] + c);
  std::vector<std::pair<std::string, std::string>> pairs;
  auto name = [](const std::string& w) { return w.empty() ? std::string("e") : w; };
  for (const auto& a : words)
    for (const auto& b : words)
      if (b.compare(0, a.size(), a) == 0) pairs.emplace_back(name(a), name(b));
  std::vector<std::string> names;
  for (const auto& w : words) names.push_back(name(w));
  return FinitePointedPoset::validate(names, pairs);
}

inline FinitePointedPoset chain_poset(std::size_t n) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) names.push_back(std::to_string(i));
  return FinitePointedPoset::from_order(names, [](ElementId a, ElementId b) { return a <= b; });
}

/// A random poset on n elements with 0 as bottom: a random DAG on the
/// natural order, transitively closed.
inline FinitePointedPoset random_poset(std::mt19937_64& rng, std::size_t n) {
  std::vector<std::vector<char>> le(n, std::vector<char>(n, 0));
  for (std::size_t i = 0; i < n; ++i) {
    le[i][i] = 1;
    le[0][i] = 1;
  }
  for (std::size_t i = 1; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (rng() % 3 == 0) le[i][j] = 1;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (le[i][k] && le[k][j]) le[i][j] = 1;
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) names.push_back("p" + std::to_string(i));
  return FinitePointedPoset::from_order(names, [&](ElementId a, ElementId b) { return le[a][b] != 0; });
}

/// A random monotone endomap, chosen element by element in a linear
/// extension; restarts when some element has no admissible image.
inline std::vector<ElementId> random_monotone(std::mt19937_64& rng, const FinitePointedPoset& p) {
  const auto n = p.size();
  std::vector<ElementId> order(n);
  for (ElementId i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](ElementId a, ElementId b) { return p.down(a).count() < p.down(b).count(); });
  for (;;) {
    std::vector<ElementId> f(n, 0);
    bool ok = true;
    for (auto x : order) {
      std::vector<ElementId> candidates;
      for (ElementId z = 0; z < n; ++z) {
        bool above = true;
        for (ElementId y = 0; y < n && above; ++y)
          if (y != x && p.leq(y, x) && !p.leq(f[y], z)) above = false;
        if (above) candidates.push_back(z);
      }
      if (candidates.empty()) {
        ok = false;
        break;
      }
      f[x] = candidates[rng() % candidates.size()];
    }
    if (ok) return f;
  }
}

/// Least fixpoint by scanning: the fixpoint below every other one.
inline std::optional<ElementId> brute_lfp(const FinitePointedPoset& p, const std::vector<ElementId>& f) {
  std::vector<ElementId> fixed;
  for (ElementId x = 0; x < p.size(); ++x)
    if (f[x] == x) fixed.push_back(x);
  for (auto x : fixed)
    if (std::all_of(fixed.begin(), fixed.end(), [&](ElementId y) { return p.leq(x, y); })) return x;
  return std::nullopt;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

inline std::string fixture(const std::string& name) { return std::string(GKAHN_FIXTURES) + "/" + name; }

inline gkahn::Document load_fixture(const std::string& name, const gkahn::DocumentOptions& options = {}) {
  return gkahn::parse_document(fixture(name), options);
}

/// The fixtures that must pass every check.
inline std::vector<std::string> passing_fixtures() {
  return {"feedback_prepend.json",   "dmerge_constants.json",      "pipeline_copy.json",
          "negate_map.json",         "fork_copy.json",             "mutual_feedback.json",
          "conflict_events.json",    "choice_const.json",          "choice_feedback.json",
          "fair_merge.json",         "sync_table.json",            "pipeline_copy_linear.json",
          "conflict_events_linear.json", "mutual_feedback_linear.json"};
}

inline std::vector<std::string> mutation_fixtures() {
  return {"mutations/corrupt_restriction.json", "mutations/inject_trace.json", "mutations/drop_maximal.json"};
}

/// Runs a command and captures stdout; the exit status goes to `status`.
inline std::string run_command(const std::string& command, int& status) {
  std::string out;
  FILE* pipe = ::popen(command.c_str(), "r");
  if (!pipe) {
    status = -1;
    return out;
  }
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
  const int raw = ::pclose(pipe);
  status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return out;
}

}  // namespace support
