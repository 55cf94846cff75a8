#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "mdsr/error.hpp"
#include "mdsr/poset.hpp"

namespace mdsr {

/// Sorted set of distinct agents. Used both for the (d-1)-sets that
/// agents rank and for the d-sets that form a matching.
class AgentSet {
 public:
  AgentSet() = default;

  explicit AgentSet(std::vector<AgentId> members) : members_(std::move(members)) {
    std::sort(members_.begin(), members_.end());
    if (std::adjacent_find(members_.begin(), members_.end()) != members_.end())
      throw Error(Errc::InvalidArgument, "agent listed twice in a set");
  }

  AgentSet(std::initializer_list<AgentId> members) : AgentSet(std::vector<AgentId>(members)) {}

  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  AgentId operator[](std::size_t i) const { return members_[i]; }
  auto begin() const { return members_.begin(); }
  auto end() const { return members_.end(); }
  std::span<const AgentId> members() const { return members_; }

  bool contains(AgentId a) const { return std::binary_search(members_.begin(), members_.end(), a); }

  bool intersects(const AgentSet& o) const {
    auto i = members_.begin();
    auto j = o.members_.begin();
    while (i != members_.end() && j != o.members_.end()) {
      if (*i == *j) return true;
      if (*i < *j) ++i; else ++j;
    }
    return false;
  }

  AgentSet without(AgentId a) const {
    AgentSet r;
    r.members_.reserve(members_.size());
    for (AgentId x : members_)
      if (x != a) r.members_.push_back(x);
    return r;
  }

  AgentSet with(AgentId a) const {
    AgentSet r;
    r.members_.reserve(members_.size() + 1);
    auto it = std::lower_bound(members_.begin(), members_.end(), a);
    if (it != members_.end() && *it == a) throw Error(Errc::InvalidArgument, "agent already in set");
    r.members_.insert(r.members_.end(), members_.begin(), it);
    r.members_.push_back(a);
    r.members_.insert(r.members_.end(), it, members_.end());
    return r;
  }

  friend auto operator<=>(const AgentSet&, const AgentSet&) = default;
  friend bool operator==(const AgentSet&, const AgentSet&) = default;

 private:
  std::vector<AgentId> members_;
};

/// A (d-1)-set ranked in preference lists.
using TupleSet = AgentSet;
/// A d-set of a matching.
using Group = AgentSet;

struct AgentSetHash {
  std::size_t operator()(const AgentSet& s) const noexcept {
    std::size_t h = 0xcbf29ce484222325ULL;
    for (AgentId a : s) {
      h ^= a + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
  }
};

}  // namespace mdsr
