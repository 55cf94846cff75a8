#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "mdsr/core.hpp"

namespace mdsr {

struct BlockingEvidence {
  AgentId agent = 0;
  std::optional<TupleSet> current;  // absent when unmatched
  TupleSet preferred;
};

struct BlockingReport {
  Group group;
  std::vector<BlockingEvidence> evidence;
};

struct StabilityLimits {
  std::uint64_t max_groups = 100'000'000;
};

struct BruteForceLimits {
  std::size_t max_agents = 12;          // complete preferences
  std::uint64_t max_nodes = 50'000'000;  // search nodes, any instance
};

namespace detail {

inline std::vector<std::optional<TupleSet>> current_sets(const Instance& inst, const Matching& m) {
  std::vector<std::optional<TupleSet>> cur(inst.size());
  for (const auto& g : m.groups)
    for (AgentId a : g) cur[a] = g.without(a);
  return cur;
}

inline bool blocks(const Instance& inst, const std::vector<std::optional<TupleSet>>& cur, const Group& g) {
  for (AgentId a : g) {
    TupleSet t = g.without(a);
    if (!inst.is_acceptable(a, t)) return false;
    if (cur[a] && (*cur[a] == t || !inst.prefers_unchecked(a, t, *cur[a]))) return false;
  }
  return true;
}

inline BlockingReport make_report(const std::vector<std::optional<TupleSet>>& cur, const Group& g) {
  BlockingReport r{g, {}};
  for (AgentId a : g) r.evidence.push_back({a, cur[a], g.without(a)});
  return r;
}

/// Every d-set acceptable to all of its members, sorted.
inline std::vector<Group> acceptable_groups(const Instance& inst) {
  std::set<Group> out;
  const auto& acc = *inst.acceptability();
  for (AgentId a = 0; a < inst.size(); ++a) {
    for (const auto& t : acc[a]) {
      Group g = t.with(a);
      if (g[0] != a) continue;
      bool ok = true;
      for (AgentId b : g)
        if (!inst.is_acceptable(b, g.without(b))) ok = false;
      if (ok) out.insert(std::move(g));
    }
  }
  return {out.begin(), out.end()};
}

}  // namespace detail

/// Lexicographically least blocking d-set of m, if any.
inline std::optional<BlockingReport> find_blocking(const Instance& inst, const Matching& m,
                                                   const StabilityLimits& limits = {}) {
  if (auto chk = validate_matching(inst, m); !chk)
    throw Error(Errc::PreconditionViolated, "invalid matching: " + chk.detail);
  const auto cur = detail::current_sets(inst, m);
  const std::size_t n = inst.size();
  const std::size_t d = inst.d();

  if (!inst.complete()) {
    for (const auto& g : detail::acceptable_groups(inst))
      if (detail::blocks(inst, cur, g)) return detail::make_report(cur, g);
    return std::nullopt;
  }

  if (n < d) return std::nullopt;
  if (binomial(n, d) > limits.max_groups)
    throw Error(Errc::TooLarge, "C(" + std::to_string(n) + "," + std::to_string(d) + ") groups exceed the guard");
  std::vector<AgentId> comb(d);
  for (std::size_t i = 0; i < d; ++i) comb[i] = static_cast<AgentId>(i);
  do {
    Group g(comb);
    if (detail::blocks(inst, cur, g)) return detail::make_report(cur, g);
  } while (next_combination(comb, n));
  return std::nullopt;
}

inline bool is_stable(const Instance& inst, const Matching& m, const StabilityLimits& limits = {}) {
  return !find_blocking(inst, m, limits).has_value();
}

namespace detail {

class MatchingEnumerator {
 public:
  MatchingEnumerator(const Instance& inst, const BruteForceLimits& limits) : inst_(inst), limits_(limits) {
    const std::size_t n = inst.size();
    if (inst.complete()) {
      if (n > limits.max_agents)
        throw Error(Errc::TooLarge, std::to_string(n) + " agents exceed the brute-force guard of " +
                                        std::to_string(limits.max_agents));
      unmatched_budget_ = n % inst.d();
    } else {
      by_min_.resize(n);
      for (auto& g : acceptable_groups(inst)) by_min_[g[0]].push_back(std::move(g));
      unmatched_budget_ = n;
    }
    free_.assign(n, 1);
  }

  template <class Fn>
  void run(Fn&& visit) {
    Matching m;
    recurse(0, 0, m, visit);
  }

 private:
  template <class Fn>
  void recurse(AgentId from, std::size_t unmatched, Matching& m, Fn& visit) {
    if (++nodes_ > limits_.max_nodes) throw Error(Errc::TooLarge, "brute-force search exceeded its node budget");
    const std::size_t n = inst_.size();
    AgentId x = from;
    while (x < n && !free_[x]) ++x;
    if (x >= n) {
      visit(static_cast<const Matching&>(m));
      return;
    }
    auto place = [&](const Group& g) {
      for (AgentId a : g) free_[a] = 0;
      m.groups.push_back(g);
      recurse(x + 1, unmatched, m, visit);
      m.groups.pop_back();
      for (AgentId a : g) free_[a] = 1;
    };
    if (inst_.complete()) {
      std::vector<AgentId> rest;
      for (AgentId y = x + 1; y < n; ++y)
        if (free_[y]) rest.push_back(y);
      for_each_subset(rest, inst_.d() - 1, [&](const std::vector<AgentId>& s) { place(TupleSet(s).with(x)); });
    } else {
      for (const auto& g : by_min_[x])
        if (std::all_of(g.begin(), g.end(), [&](AgentId a) { return free_[a]; })) place(g);
    }
    if (unmatched < unmatched_budget_) {
      free_[x] = 0;
      recurse(x + 1, unmatched + 1, m, visit);
      free_[x] = 1;
    }
  }

  const Instance& inst_;
  BruteForceLimits limits_;
  std::size_t unmatched_budget_ = 0;
  std::vector<std::vector<Group>> by_min_;
  std::vector<char> free_;
  std::uint64_t nodes_ = 0;
};

}  // namespace detail

/// All stable matchings, sorted canonically.
inline std::vector<Matching> enumerate_stable(const Instance& inst, const BruteForceLimits& limits = {}) {
  std::vector<Matching> out;
  StabilityLimits unlimited{std::numeric_limits<std::uint64_t>::max()};
  detail::MatchingEnumerator e(inst, limits);
  e.run([&](const Matching& m) {
    if (is_stable(inst, m, unlimited)) {
      Matching c = m;
      out.push_back(std::move(c.canonicalize()));
    }
  });
  std::sort(out.begin(), out.end(), [](const Matching& a, const Matching& b) { return a.groups < b.groups; });
  return out;
}

inline std::optional<Matching> brute_force_solve(const Instance& inst, const BruteForceLimits& limits = {}) {
  auto all = enumerate_stable(inst, limits);
  if (all.empty()) return std::nullopt;
  return all.front();
}

}  // namespace mdsr
