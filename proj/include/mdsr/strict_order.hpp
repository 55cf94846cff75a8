#pragma once

#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "mdsr/core.hpp"

namespace mdsr {

struct StrictOrderRecovery {
  std::optional<std::vector<AgentId>> order;  // best agent first
  std::string diagnostic;                     // why recovery failed
  explicit operator bool() const { return order.has_value(); }
};

/// Copy of inst without the given agents; remaining agents keep their
/// relative order and lists lose every set that mentions a removed agent.
inline Instance delete_agents(const Instance& inst, std::span<const AgentId> removed) {
  const std::size_t n = inst.size();
  std::vector<char> gone(n, 0);
  for (AgentId a : removed) gone.at(a) = 1;
  std::vector<AgentId> remap(n, 0);
  std::vector<std::string> names;
  for (AgentId a = 0; a < n; ++a) {
    if (gone[a]) continue;
    remap[a] = static_cast<AgentId>(names.size());
    names.push_back(inst.name(a));
  }
  auto keep = [&](const std::vector<TupleSet>& list) {
    std::vector<TupleSet> out;
    for (const auto& t : list) {
      if (std::any_of(t.begin(), t.end(), [&](AgentId x) { return gone[x]; })) continue;
      std::vector<AgentId> ids;
      for (AgentId x : t) ids.push_back(remap[x]);
      out.emplace_back(std::move(ids));
    }
    return out;
  };
  const auto lists = materialize_lists(inst);
  PreferenceLists kept;
  std::optional<Acceptability> acc;
  if (inst.acceptability()) acc.emplace();
  for (AgentId a = 0; a < n; ++a) {
    if (gone[a]) continue;
    kept.push_back(keep(lists[a]));
    if (acc) acc->push_back(keep((*inst.acceptability())[a]));
  }
  return Instance(inst.d(), std::move(names), ExplicitLists{std::move(kept)}, std::move(acc));
}

/// Searches for a strict order of the agents from which every list is derived.
inline StrictOrderRecovery recover_strict_order(const Instance& inst) {
  const std::size_t n = inst.size();
  const auto lists = materialize_lists(inst);

  // forced[b][c]: some agent ranks S+b above S+c, so b must beat c.
  std::vector<std::vector<char>> forced(n, std::vector<char>(n, 0));
  for (AgentId x = 0; x < n; ++x) {
    const auto ranks = detail::rank_list(lists[x], "recover");
    for (const auto& [t, pos] : ranks) {
      for (AgentId b : t) {
        TupleSet rest = t.without(b);
        for (AgentId c = 0; c < n; ++c) {
          if (c == x || t.contains(c)) continue;
          auto it = ranks.find(rest.with(c));
          if (it != ranks.end() && it->second > pos) forced[b][c] = 1;
        }
      }
    }
  }

  StrictOrderRecovery out;
  for (AgentId b = 0; b < n; ++b)
    for (AgentId c = b + 1; c < n; ++c)
      if (forced[b][c] && forced[c][b]) {
        out.diagnostic = "conflicting swaps: " + inst.name(b) + " > " + inst.name(c) + " and the reverse";
        return out;
      }

  std::vector<std::size_t> indeg(n, 0);
  for (AgentId b = 0; b < n; ++b)
    for (AgentId c = 0; c < n; ++c) indeg[c] += forced[b][c];
  std::priority_queue<AgentId, std::vector<AgentId>, std::greater<>> ready;
  for (AgentId a = 0; a < n; ++a)
    if (indeg[a] == 0) ready.push(a);
  std::vector<AgentId> order;
  while (!ready.empty()) {
    AgentId a = ready.top();
    ready.pop();
    order.push_back(a);
    for (AgentId c = 0; c < n; ++c)
      if (forced[a][c] && --indeg[c] == 0) ready.push(c);
  }
  if (order.size() != n) {
    out.diagnostic = "forced swaps contain a cycle among:";
    for (AgentId a = 0; a < n; ++a)
      if (indeg[a] > 0) out.diagnostic += " " + inst.name(a);
    return out;
  }

  Poset chain = Poset::chain(order);
  for (AgentId a = 0; a < n; ++a) {
    if (!agent_derived_from_poset(lists[a], chain)) {
      out.diagnostic = "list of " + inst.name(a) + " violates dominance under the forced order";
      return out;
    }
  }
  out.order = std::move(order);
  return out;
}

struct DeletionDistance {
  std::size_t lambda = 0;
  std::vector<AgentId> witness;        // deleted agents, original indices
  std::vector<AgentId> order;          // order of the remaining agents, original indices
};

/// Fewest deletions that leave a strict-order-derived profile. Subsets are
/// tried by size, then lexicographically. Throws BudgetExceeded.
inline DeletionDistance deletion_distance(const Instance& inst, std::size_t max_budget) {
  const std::size_t n = inst.size();
  std::vector<AgentId> all(n);
  for (AgentId a = 0; a < n; ++a) all[a] = a;
  for (std::size_t size = 0; size <= max_budget && size < n; ++size) {
    std::optional<DeletionDistance> found;
    for_each_subset(all, size, [&](const std::vector<AgentId>& del) {
      if (found) return;
      Instance rest = delete_agents(inst, del);
      auto rec = recover_strict_order(rest);
      if (!rec) return;
      std::vector<AgentId> kept;
      for (AgentId a = 0; a < n; ++a)
        if (!std::binary_search(del.begin(), del.end(), a)) kept.push_back(a);
      DeletionDistance r{size, del, {}};
      for (AgentId x : *rec.order) r.order.push_back(kept[x]);
      found = std::move(r);
    });
    if (found) return *found;
  }
  throw Error(Errc::BudgetExceeded, "no deletion set of size at most " + std::to_string(max_budget) + " works");
}

}  // namespace mdsr
