#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

namespace mdsr {

// Maximum bipartite matching by augmenting paths.
// adj[u] lists right vertices reachable from left vertex u.
class BipartiteMatcher {
 public:
  BipartiteMatcher(std::size_t left, std::size_t right)
      : adj_(left), match_right_(right, npos) {}

  void add_edge(std::size_t u, std::size_t v) { adj_[u].push_back(v); }

  std::size_t solve() {
    std::size_t size = 0;
    std::vector<char> seen(match_right_.size());
    for (std::size_t u = 0; u < adj_.size(); ++u) {
      std::fill(seen.begin(), seen.end(), 0);
      if (augment(u, seen)) ++size;
    }
    return size;
  }

 private:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  bool augment(std::size_t u, std::vector<char>& seen) {
    for (std::size_t v : adj_[u]) {
      if (seen[v]) continue;
      seen[v] = 1;
      if (match_right_[v] == npos || augment(match_right_[v], seen)) {
        match_right_[v] = u;
        return true;
      }
    }
    return false;
  }

  std::vector<std::vector<std::size_t>> adj_;
  std::vector<std::size_t> match_right_;
};

}  // namespace mdsr
