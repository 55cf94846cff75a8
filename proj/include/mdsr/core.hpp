#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <variant>
#include <vector>

#include "mdsr/agent_set.hpp"
#include "mdsr/bipartite.hpp"
#include "mdsr/combinatorics.hpp"
#include "mdsr/error.hpp"
#include "mdsr/poset.hpp"

namespace mdsr {

/// Largest explicit per-agent list the library will store.
inline constexpr std::uint64_t kMaxExplicitListLength = 1'000'000;
/// Largest global master list of sets the library will store.
inline constexpr std::uint64_t kMaxMasterListLength = 10'000'000;

using PreferenceLists = std::vector<std::vector<TupleSet>>;

/// Every agent ranks its own list directly.
struct ExplicitLists {
  PreferenceLists lists;
  friend bool operator==(const ExplicitLists&, const ExplicitLists&) = default;
};

/// One global ranking of all (d-1)-sets; an agent skips the sets holding itself.
struct MasterListSets {
  std::vector<TupleSet> list;
  friend bool operator==(const MasterListSets&, const MasterListSets&) = default;
};

/// Preferences derived from a partial order on agents. Without a completion
/// the canonical tiebreak is used (lexicographic on sorted lpo positions).
struct MasterPoset {
  Poset poset;
  std::optional<PreferenceLists> completion;
  friend bool operator==(const MasterPoset&, const MasterPoset&) = default;
};

using PreferenceSource = std::variant<ExplicitLists, MasterListSets, MasterPoset>;

/// Per-agent acceptable (d-1)-sets; absent means complete preferences.
using Acceptability = std::vector<std::vector<TupleSet>>;

/// True iff t dominates u: some bijection maps each member of t to a member
/// of u that it is at least as good as, and t != u.
inline bool dominates(const Poset& p, const TupleSet& t, const TupleSet& u) {
  if (t.size() != u.size()) throw Error(Errc::SizeMismatch, "dominance between sets of different size");
  if (t == u) return false;
  BipartiteMatcher m(t.size(), u.size());
  for (std::size_t i = 0; i < t.size(); ++i)
    for (std::size_t j = 0; j < u.size(); ++j)
      if (p.geq(t[i], u[j])) m.add_edge(i, j);
  return m.solve() == t.size();
}

/// Sorted lpo positions of the members of t.
inline std::vector<std::size_t> canonical_rank(const LpoOrder& lpo, const TupleSet& t) {
  std::vector<std::size_t> r;
  r.reserve(t.size());
  for (AgentId a : t) r.push_back(lpo.position.at(a));
  std::sort(r.begin(), r.end());
  return r;
}

namespace detail {

inline bool canonical_less(const LpoOrder& lpo, const TupleSet& t, const TupleSet& u) {
  return canonical_rank(lpo, t) < canonical_rank(lpo, u);
}

inline void check_tuple(const TupleSet& t, std::size_t n, std::size_t d, const std::string& where) {
  if (t.size() + 1 != d) throw Error(Errc::SizeMismatch, where + ": set of size " + std::to_string(t.size()) + ", expected " + std::to_string(d - 1));
  for (AgentId a : t)
    if (a >= n) throw Error(Errc::ValidationError, where + ": unknown agent index " + std::to_string(a));
}

using RankMap = std::unordered_map<TupleSet, std::uint32_t, AgentSetHash>;

inline RankMap rank_list(const std::vector<TupleSet>& list, const std::string& where) {
  RankMap r;
  r.reserve(list.size() * 2);
  for (std::uint32_t i = 0; i < list.size(); ++i)
    if (!r.emplace(list[i], i).second) throw Error(Errc::ValidationError, where + ": duplicate set in list");
  return r;
}

}  // namespace detail

class Instance {
 public:
  Instance(std::size_t d, std::vector<std::string> names, PreferenceSource source,
           std::optional<Acceptability> acceptability = std::nullopt)
      : d_(d), names_(std::move(names)), source_(std::move(source)), acceptability_(std::move(acceptability)) {
    validate_and_index();
  }

  std::size_t d() const { return d_; }
  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(AgentId a) const { return names_.at(a); }

  std::optional<AgentId> find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  const PreferenceSource& source() const { return source_; }
  const std::optional<Acceptability>& acceptability() const { return acceptability_; }
  bool complete() const { return !acceptability_.has_value(); }

  /// Non-null for MasterPoset sources.
  const Poset* poset() const {
    auto* mp = std::get_if<MasterPoset>(&source_);
    return mp ? &mp->poset : nullptr;
  }
  const LpoOrder* lpo() const { return poset() ? &lpo_ : nullptr; }
  /// True when preferences come from the canonical tiebreak.
  bool canonical() const {
    auto* mp = std::get_if<MasterPoset>(&source_);
    return mp && !mp->completion;
  }

  bool is_acceptable(AgentId a, const TupleSet& t) const {
    if (t.contains(a)) return false;
    if (!acceptability_) return t.size() + 1 == d_;
    return accept_[a].count(t) > 0;
  }

  /// Whether a ranks t strictly above u. Checks preconditions.
  bool prefers(AgentId a, const TupleSet& t, const TupleSet& u) const {
    if (a >= size()) throw Error(Errc::InvalidArgument, "unknown agent");
    detail::check_tuple(t, size(), d_, "prefers");
    detail::check_tuple(u, size(), d_, "prefers");
    if (t.contains(a) || u.contains(a)) throw Error(Errc::SelfInclusion, "set contains agent " + names_[a]);
    if (t == u) throw Error(Errc::PreconditionViolated, "prefers called with identical sets");
    if (acceptability_ && (!accept_[a].count(t) || !accept_[a].count(u)))
      throw Error(Errc::UnacceptableSet, "set outside acceptable sets of " + names_[a]);
    return prefers_unchecked(a, t, u);
  }

  /// As prefers, without precondition checks.
  bool prefers_unchecked(AgentId a, const TupleSet& t, const TupleSet& u) const {
    if (!agent_rank_.empty()) return agent_rank_[a].at(t) < agent_rank_[a].at(u);
    if (!master_rank_.empty()) return master_rank_.at(t) < master_rank_.at(u);
    return detail::canonical_less(lpo_, t, u);
  }

  /// Best (d-1)-set of a avoiding the excluded agents.
  TupleSet first_choice(AgentId a, std::span<const AgentId> excluded) const {
    if (a >= size()) throw Error(Errc::InvalidArgument, "unknown agent");
    std::vector<char> out(size(), 0);
    for (AgentId x : excluded)
      if (x < size()) out[x] = 1;
    out[a] = 1;
    auto avoids = [&](const TupleSet& t) {
      return std::none_of(t.begin(), t.end(), [&](AgentId x) { return out[x]; });
    };
    if (auto* ex = std::get_if<ExplicitLists>(&source_)) {
      for (const auto& t : ex->lists[a])
        if (avoids(t)) return t;
    } else if (auto* ml = std::get_if<MasterListSets>(&source_)) {
      for (const auto& t : ml->list)
        if (avoids(t) && is_acceptable(a, t)) return t;
    } else {
      const auto& mp = std::get<MasterPoset>(source_);
      if (mp.completion) {
        for (const auto& t : (*mp.completion)[a])
          if (avoids(t)) return t;
      } else if (acceptability_) {
        const TupleSet* best = nullptr;
        for (const auto& t : (*acceptability_)[a])
          if (avoids(t) && (!best || detail::canonical_less(lpo_, t, *best))) best = &t;
        if (best) return *best;
      } else {
        std::vector<AgentId> pick;
        for (AgentId x : lpo_.order) {
          if (pick.size() + 1 == d_) break;
          if (!out[x]) pick.push_back(x);
        }
        if (pick.size() + 1 == d_) return TupleSet(std::move(pick));
      }
    }
    throw Error(Errc::InsufficientAgents, "no (d-1)-set available to " + names_[a]);
  }

  friend bool operator==(const Instance& x, const Instance& y) {
    return x.d_ == y.d_ && x.names_ == y.names_ && x.source_ == y.source_ && x.acceptability_ == y.acceptability_;
  }

 private:
  void validate_list(AgentId a, const std::vector<TupleSet>& list, const std::string& where) {
    if (list.size() > kMaxExplicitListLength) throw Error(Errc::TooLarge, where + ": list too long");
    for (const auto& t : list) {
      detail::check_tuple(t, size(), d_, where);
      if (t.contains(a)) throw Error(Errc::SelfInclusion, where + ": list of " + names_[a] + " contains the agent");
    }
    auto ranks = detail::rank_list(list, where);
    if (acceptability_) {
      const auto& acc = accept_[a];
      bool same = ranks.size() == acc.size() &&
                  std::all_of(acc.begin(), acc.end(), [&](const TupleSet& t) { return ranks.count(t) > 0; });
      if (!same) throw Error(Errc::ValidationError, where + ": list of " + names_[a] + " differs from its acceptable sets");
    } else if (list.size() != binomial(size() - 1, d_ - 1)) {
      throw Error(Errc::Incomplete, where + ": list of " + names_[a] + " does not rank every (d-1)-set");
    }
    agent_rank_.push_back(std::move(ranks));
  }

  void validate_and_index() {
    const std::size_t n = size();
    if (d_ < 2) throw Error(Errc::ValidationError, "group size d must be at least 2");
    if (n == 0) throw Error(Errc::ValidationError, "instance has no agents");
    for (AgentId a = 0; a < n; ++a) {
      if (names_[a].empty()) throw Error(Errc::ValidationError, "empty agent name");
      if (!index_.emplace(names_[a], a).second) throw Error(Errc::ValidationError, "duplicate agent name " + names_[a]);
    }

    if (acceptability_) {
      if (acceptability_->size() != n) throw Error(Errc::ValidationError, "acceptability must list every agent");
      accept_.resize(n);
      for (AgentId a = 0; a < n; ++a) {
        for (const auto& t : (*acceptability_)[a]) {
          detail::check_tuple(t, n, d_, "acceptability");
          if (t.contains(a)) throw Error(Errc::SelfInclusion, "acceptable set of " + names_[a] + " contains the agent");
          if (!accept_[a].insert(t).second) throw Error(Errc::ValidationError, "duplicate acceptable set for " + names_[a]);
        }
      }
    }

    if (auto* ex = std::get_if<ExplicitLists>(&source_)) {
      if (ex->lists.size() != n) throw Error(Errc::ValidationError, "explicit lists must cover every agent");
      for (AgentId a = 0; a < n; ++a) validate_list(a, ex->lists[a], "explicit");
    } else if (auto* ml = std::get_if<MasterListSets>(&source_)) {
      if (ml->list.size() > kMaxMasterListLength) throw Error(Errc::TooLarge, "master list too long");
      for (const auto& t : ml->list) detail::check_tuple(t, n, d_, "master list");
      master_rank_ = detail::rank_list(ml->list, "master list");
      if (ml->list.size() != binomial(n, d_ - 1))
        throw Error(Errc::ValidationError, "master list must rank every (d-1)-subset exactly once");
    } else {
      auto& mp = std::get<MasterPoset>(source_);
      if (mp.poset.size() != n) throw Error(Errc::ValidationError, "poset size differs from agent count");
      lpo_ = lpo_order(mp.poset);
      if (acceptability_ && lpo_.kappa != 0)
        throw Error(Errc::NotStrictOrder, "acceptability with a master poset requires a strict order");
      if (mp.completion) {
        if (mp.completion->size() != n) throw Error(Errc::ValidationError, "completion must cover every agent");
        for (AgentId a = 0; a < n; ++a) validate_list(a, (*mp.completion)[a], "completion");
        for (AgentId a = 0; a < n; ++a) {
          const auto& list = (*mp.completion)[a];
          for (std::size_t i = 0; i < list.size(); ++i)
            for (std::size_t j = i + 1; j < list.size(); ++j)
              if (dominates(mp.poset, list[j], list[i]))
                throw Error(Errc::ValidationError, "completion of " + names_[a] + " is not derived from the poset");
        }
      }
    }
  }

  std::size_t d_;
  std::vector<std::string> names_;
  PreferenceSource source_;
  std::optional<Acceptability> acceptability_;

  std::unordered_map<std::string, AgentId> index_;
  std::vector<std::unordered_set<TupleSet, AgentSetHash>> accept_;
  std::vector<detail::RankMap> agent_rank_;
  detail::RankMap master_rank_;
  LpoOrder lpo_;
};

/// Sets of pairwise disjoint d-sets. Agents outside every group are unmatched.
struct Matching {
  std::vector<Group> groups;

  /// Sorts groups so equal matchings compare equal.
  Matching& canonicalize() {
    std::sort(groups.begin(), groups.end());
    return *this;
  }

  friend bool operator==(const Matching& a, const Matching& b) {
    auto x = a.groups, y = b.groups;
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    return x == y;
  }
};

/// Index of each agent's group in m, or -1 when unmatched. Assumes disjointness.
inline std::vector<std::ptrdiff_t> group_index(const Matching& m, std::size_t n) {
  std::vector<std::ptrdiff_t> idx(n, -1);
  for (std::size_t g = 0; g < m.groups.size(); ++g)
    for (AgentId a : m.groups[g])
      if (a < n) idx[a] = static_cast<std::ptrdiff_t>(g);
  return idx;
}

struct MatchingCheck {
  bool ok = true;
  std::string detail;
  explicit operator bool() const { return ok; }
};

inline MatchingCheck validate_matching(const Instance& inst, const Matching& m) {
  const std::size_t n = inst.size();
  std::vector<char> used(n, 0);
  for (const auto& g : m.groups) {
    if (g.size() != inst.d()) return {false, "group of size " + std::to_string(g.size())};
    for (AgentId a : g) {
      if (a >= n) return {false, "unknown agent index " + std::to_string(a)};
      if (used[a]) return {false, "agent " + inst.name(a) + " appears in two groups"};
      used[a] = 1;
    }
    for (AgentId a : g)
      if (!inst.is_acceptable(a, g.without(a)))
        return {false, "group unacceptable to " + inst.name(a)};
  }
  return {};
}

/// Every agent's ranked list, restricted to its acceptable sets.
inline PreferenceLists materialize_lists(const Instance& inst) {
  const std::size_t n = inst.size();
  const std::size_t k = inst.d() - 1;
  if (auto* ex = std::get_if<ExplicitLists>(&inst.source())) return ex->lists;
  if (auto* mp = std::get_if<MasterPoset>(&inst.source()); mp && mp->completion) return *mp->completion;

  PreferenceLists out(n);
  if (auto* ml = std::get_if<MasterListSets>(&inst.source())) {
    for (AgentId a = 0; a < n; ++a)
      for (const auto& t : ml->list)
        if (inst.is_acceptable(a, t)) out[a].push_back(t);
    return out;
  }
  if (binomial(n - 1, k) > kMaxExplicitListLength) throw Error(Errc::TooLarge, "lists too long to materialize");
  const LpoOrder& lpo = *inst.lpo();
  for (AgentId a = 0; a < n; ++a) {
    if (inst.acceptability()) {
      out[a] = (*inst.acceptability())[a];
    } else {
      std::vector<AgentId> others;
      for (AgentId x = 0; x < n; ++x)
        if (x != a) others.push_back(x);
      for_each_subset(others, k, [&](const std::vector<AgentId>& s) { out[a].emplace_back(s); });
    }
    std::sort(out[a].begin(), out[a].end(),
              [&](const TupleSet& x, const TupleSet& y) { return detail::canonical_less(lpo, x, y); });
  }
  return out;
}

/// Whether agent a's list is the master list with its own and unacceptable sets dropped.
inline bool agent_follows_master_list(const Instance& inst, AgentId a, std::span<const TupleSet> master) {
  const auto lists = materialize_lists(inst);
  std::vector<TupleSet> expected;
  for (const auto& t : master)
    if (inst.is_acceptable(a, t)) expected.push_back(t);
  return lists.at(a) == expected;
}

inline bool is_derived_from_master_list(const Instance& inst, std::span<const TupleSet> master) {
  const auto lists = materialize_lists(inst);
  for (AgentId a = 0; a < inst.size(); ++a) {
    std::vector<TupleSet> expected;
    for (const auto& t : master)
      if (inst.is_acceptable(a, t)) expected.push_back(t);
    if (lists[a] != expected) return false;
  }
  return true;
}

inline bool is_derived_from_master_list(const Instance& inst) {
  auto* ml = std::get_if<MasterListSets>(&inst.source());
  if (!ml) throw Error(Errc::PreconditionViolated, "instance carries no master list; pass one explicitly");
  return is_derived_from_master_list(inst, ml->list);
}

/// Whether no list ranks a set below one it dominates.
inline bool agent_derived_from_poset(const std::vector<TupleSet>& list, const Poset& p) {
  for (std::size_t i = 0; i < list.size(); ++i)
    for (std::size_t j = i + 1; j < list.size(); ++j)
      if (dominates(p, list[j], list[i])) return false;
  return true;
}

inline bool is_derived_from_poset(const Instance& inst, const Poset& p) {
  if (p.size() != inst.size()) throw Error(Errc::SizeMismatch, "poset and instance differ in size");
  const auto lists = materialize_lists(inst);
  return std::all_of(lists.begin(), lists.end(), [&](const auto& l) { return agent_derived_from_poset(l, p); });
}

}  // namespace mdsr
