#pragma once

// Shared builders, fixtures and independent oracles for the test suites.

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "mdsr/core.hpp"

namespace mdsr::testing {

using Names = std::vector<std::string>;
using NamedList = std::vector<Names>;

inline TupleSet set_of(const Instance& inst, const Names& names) {
  std::vector<AgentId> ids;
  for (const auto& n : names) ids.push_back(*inst.find(n));
  return TupleSet(ids);
}

inline Matching matching_of(const Instance& inst, const std::vector<Names>& groups) {
  Matching m;
  for (const auto& g : groups) m.groups.push_back(set_of(inst, g));
  return m;
}

inline std::vector<TupleSet> list_of(const Names& agents, const NamedList& sets) {
  std::vector<TupleSet> out;
  for (const auto& s : sets) {
    std::vector<AgentId> ids;
    for (const auto& n : s) ids.push_back(static_cast<AgentId>(std::find(agents.begin(), agents.end(), n) - agents.begin()));
    out.emplace_back(ids);
  }
  return out;
}

inline Instance explicit_instance(std::size_t d, const Names& agents, const std::map<std::string, NamedList>& lists,
                                  bool restrict_to_lists = false) {
  PreferenceLists pl(agents.size());
  for (std::size_t a = 0; a < agents.size(); ++a) pl[a] = list_of(agents, lists.at(agents[a]));
  std::optional<Acceptability> acc;
  if (restrict_to_lists) acc = pl;
  return Instance(d, agents, ExplicitLists{pl}, acc);
}

inline Names numbered(const std::string& prefix, std::size_t n, std::size_t first = 1) {
  Names out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i + first));
  return out;
}

inline Instance chain_instance(std::size_t n, std::size_t d) {
  return Instance(d, numbered("a", n), MasterPoset{Poset::identity_chain(n), std::nullopt});
}

// Example from the introduction: six agents, d = 3.
inline Instance example_one() {
  Names ag{"a", "b", "c", "d", "e", "f"};
  std::map<std::string, NamedList> l{
      {"a", {{"b", "d"}, {"b", "c"}, {"b", "e"}, {"b", "f"}, {"c", "d"}, {"c", "e"}, {"c", "f"}, {"d", "e"}, {"d", "f"}, {"e", "f"}}},
      {"b", {{"a", "d"}, {"a", "c"}, {"a", "e"}, {"a", "f"}, {"c", "d"}, {"c", "e"}, {"c", "f"}, {"d", "e"}, {"d", "f"}, {"e", "f"}}},
      {"c", {{"a", "b"}, {"a", "d"}, {"a", "e"}, {"b", "d"}, {"a", "f"}, {"b", "e"}, {"b", "f"}, {"d", "e"}, {"d", "f"}, {"e", "f"}}},
      {"d", {{"a", "b"}, {"a", "c"}, {"a", "e"}, {"a", "f"}, {"b", "c"}, {"b", "e"}, {"b", "f"}, {"c", "e"}, {"c", "f"}, {"e", "f"}}},
      {"e", {{"a", "b"}, {"a", "c"}, {"a", "d"}, {"a", "f"}, {"b", "c"}, {"b", "d"}, {"b", "f"}, {"c", "d"}, {"c", "f"}, {"d", "f"}}},
      {"f", {{"a", "b"}, {"a", "c"}, {"a", "d"}, {"a", "e"}, {"b", "c"}, {"b", "d"}, {"b", "e"}, {"c", "d"}, {"c", "e"}, {"d", "e"}}},
  };
  return explicit_instance(3, ag, l);
}

// Lexicographic master list of all 2-sets over a..f.
inline std::vector<TupleSet> lexicographic_pairs(std::size_t n) {
  std::vector<TupleSet> out;
  for (AgentId i = 0; i < n; ++i)
    for (AgentId j = i + 1; j < n; ++j) out.push_back(TupleSet{i, j});
  return out;
}

// Five-agent profile that becomes strict-order derived after one deletion.
inline Instance deletion_example() {
  Names ag = numbered("a", 5);
  std::map<std::string, NamedList> l{
      {"a1", {{"a2", "a3"}, {"a3", "a4"}, {"a2", "a5"}, {"a2", "a4"}, {"a3", "a5"}, {"a4", "a5"}}},
      {"a2", {{"a1", "a3"}, {"a3", "a4"}, {"a1", "a5"}, {"a1", "a4"}, {"a3", "a5"}, {"a4", "a5"}}},
      {"a3", {{"a1", "a2"}, {"a1", "a4"}, {"a2", "a5"}, {"a2", "a4"}, {"a1", "a5"}, {"a4", "a5"}}},
      {"a4", {{"a1", "a5"}, {"a1", "a2"}, {"a2", "a5"}, {"a1", "a3"}, {"a3", "a5"}, {"a2", "a3"}}},
      {"a5", {{"a2", "a3"}, {"a3", "a4"}, {"a1", "a2"}, {"a2", "a4"}, {"a1", "a3"}, {"a1", "a4"}}},
  };
  return explicit_instance(3, ag, l);
}

// ---- random generators ----

/// Intersection of a random linear order with a lightly perturbed copy:
/// always a valid poset, with incomparabilities controlled by `swaps`.
inline Poset random_two_dim_poset(std::mt19937_64& rng, std::size_t n, std::size_t swaps) {
  std::vector<AgentId> first(n);
  std::iota(first.begin(), first.end(), 0);
  std::shuffle(first.begin(), first.end(), rng);
  std::vector<AgentId> second = first;
  if (n >= 2) {
    std::uniform_int_distribution<std::size_t> pick(0, n - 2);
    for (std::size_t s = 0; s < swaps; ++s) {
      std::size_t i = pick(rng);
      std::swap(second[i], second[i + 1]);
    }
  }
  std::vector<std::size_t> p1(n), p2(n);
  for (std::size_t i = 0; i < n; ++i) p1[first[i]] = p2[second[i]] = i;
  std::vector<Poset::Pair> pairs;
  for (AgentId u = 0; u < n; ++u)
    for (AgentId v = 0; v < n; ++v)
      if (u != v && p1[u] < p1[v] && p2[u] < p2[v]) pairs.emplace_back(u, v);
  return Poset::from_pairs(n, pairs);
}

/// Random DAG on a hidden topological order, each forward edge with probability p.
inline Poset random_dag_poset(std::mt19937_64& rng, std::size_t n, double p) {
  std::vector<AgentId> topo(n);
  std::iota(topo.begin(), topo.end(), 0);
  std::shuffle(topo.begin(), topo.end(), rng);
  std::bernoulli_distribution coin(p);
  std::vector<Poset::Pair> pairs;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (coin(rng)) pairs.emplace_back(topo[i], topo[j]);
  return Poset::from_pairs(n, pairs);
}

/// A random linear extension of dominance over all (d-1)-sets of one agent.
inline std::vector<TupleSet> random_derived_list(std::mt19937_64& rng, const Poset& p, AgentId owner, std::size_t k) {
  std::vector<AgentId> others;
  for (AgentId x = 0; x < p.size(); ++x)
    if (x != owner) others.push_back(x);
  std::vector<TupleSet> pool;
  for_each_subset(others, k, [&](const std::vector<AgentId>& s) { pool.emplace_back(s); });
  std::vector<TupleSet> out;
  while (!pool.empty()) {
    std::vector<std::size_t> maximal;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      bool beaten = false;
      for (std::size_t j = 0; j < pool.size() && !beaten; ++j) beaten = j != i && dominates(p, pool[j], pool[i]);
      if (!beaten) maximal.push_back(i);
    }
    std::size_t pick = maximal[std::uniform_int_distribution<std::size_t>(0, maximal.size() - 1)(rng)];
    out.push_back(pool[pick]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
  }
  return out;
}

// ---- independent oracles ----

/// Dominance by trying every bijection.
inline bool oracle_dominates(const Poset& p, const TupleSet& t, const TupleSet& u) {
  if (t == u) return false;
  std::vector<AgentId> perm(u.begin(), u.end());
  do {
    bool ok = true;
    for (std::size_t i = 0; i < t.size() && ok; ++i) ok = t[i] == perm[i] || p.greater(t[i], perm[i]);
    if (ok) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

/// Largest antichain by subset enumeration.
inline std::size_t oracle_max_antichain(const Poset& p) {
  const std::size_t n = p.size();
  std::size_t best = 0;
  for (std::uint32_t mask = 0; mask < (1U << n); ++mask) {
    bool anti = true;
    for (AgentId u = 0; u < n && anti; ++u)
      for (AgentId v = 0; v < n && anti; ++v)
        if ((mask >> u & 1) && (mask >> v & 1) && p.greater(u, v)) anti = false;
    if (anti) best = std::max<std::size_t>(best, static_cast<std::size_t>(__builtin_popcount(mask)));
  }
  return best;
}

/// Whether a list respects the strict order given as a ranking, checked
/// by comparing sorted rank vectors componentwise.
inline bool oracle_list_respects_order(const std::vector<TupleSet>& list, const std::vector<std::size_t>& rank) {
  auto vec = [&](const TupleSet& t) {
    std::vector<std::size_t> r;
    for (AgentId a : t) r.push_back(rank[a]);
    std::sort(r.begin(), r.end());
    return r;
  };
  for (std::size_t i = 0; i < list.size(); ++i)
    for (std::size_t j = i + 1; j < list.size(); ++j) {
      auto x = vec(list[i]), y = vec(list[j]);
      bool y_better = x != y;
      for (std::size_t q = 0; q < x.size(); ++q) y_better = y_better && y[q] <= x[q];
      if (y_better) return false;
    }
  return true;
}

/// Whether any total order of the agents makes every list derived.
inline bool oracle_some_order_works(const PreferenceLists& lists) {
  const std::size_t n = lists.size();
  std::vector<AgentId> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  do {
    std::vector<std::size_t> rank(n);
    for (std::size_t i = 0; i < n; ++i) rank[perm[i]] = i;
    if (std::all_of(lists.begin(), lists.end(), [&](const auto& l) { return oracle_list_respects_order(l, rank); }))
      return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

/// Stability by scanning every d-set against explicit list positions.
inline bool oracle_is_stable(const Instance& inst, const Matching& m) {
  const auto lists = materialize_lists(inst);
  const std::size_t n = inst.size(), d = inst.d();
  std::vector<std::map<TupleSet, std::size_t>> pos(n);
  for (AgentId a = 0; a < n; ++a)
    for (std::size_t i = 0; i < lists[a].size(); ++i) pos[a][lists[a][i]] = i;
  std::vector<std::optional<TupleSet>> cur(n);
  for (const auto& g : m.groups)
    for (AgentId a : g) cur[a] = g.without(a);
  bool stable = true;
  std::vector<AgentId> all(n);
  std::iota(all.begin(), all.end(), 0);
  for_each_subset(all, d, [&](const std::vector<AgentId>& members) {
    if (!stable) return;
    Group g(members);
    for (AgentId a : g) {
      auto t = g.without(a);
      auto it = pos[a].find(t);
      if (it == pos[a].end()) return;
      if (cur[a] && (*cur[a] == t || pos[a].at(*cur[a]) < it->second)) return;
    }
    stable = false;
  });
  return stable;
}

/// All stable matchings by bitmask recursion over every partial matching.
inline std::vector<Matching> oracle_stable_matchings(const Instance& inst) {
  const std::size_t n = inst.size(), d = inst.d();
  std::vector<Matching> out;
  Matching m;
  std::vector<char> free(n, 1);
  auto rec = [&](auto&& self, AgentId from) -> void {
    while (from < n && !free[from]) ++from;
    if (from >= n) {
      if (oracle_is_stable(inst, m)) {
        Matching c = m;
        out.push_back(std::move(c.canonicalize()));
      }
      return;
    }
    free[from] = 0;
    self(self, from + 1);
    std::vector<AgentId> rest;
    for (AgentId y = from + 1; y < n; ++y)
      if (free[y]) rest.push_back(y);
    for_each_subset(rest, d - 1, [&](const std::vector<AgentId>& s) {
      Group g = TupleSet(s).with(from);
      if (!validate_matching(inst, Matching{{g}})) return;
      for (AgentId a : s) free[a] = 0;
      m.groups.push_back(g);
      self(self, from + 1);
      m.groups.pop_back();
      for (AgentId a : s) free[a] = 1;
    });
    free[from] = 1;
  };
  rec(rec, 0);
  std::sort(out.begin(), out.end(), [](const Matching& a, const Matching& b) { return a.groups < b.groups; });
  return out;
}

/// Canonical-tiebreak instance over a random poset.
inline Instance random_poset_instance(std::mt19937_64& rng, std::size_t n, std::size_t d, std::size_t swaps) {
  return Instance(d, numbered("a", n), MasterPoset{random_two_dim_poset(rng, n, swaps), std::nullopt});
}

}  // namespace mdsr::testing
