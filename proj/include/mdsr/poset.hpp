#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <queue>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mdsr/bipartite.hpp"
#include "mdsr/error.hpp"

namespace mdsr {

using AgentId = std::uint32_t;

/// Strict partial order over agents 0..n-1, stored transitively closed.
class Poset {
 public:
  using Pair = std::pair<AgentId, AgentId>;

  Poset() = default;

  /// Builds the closure of the given "first is better than second" pairs.
  /// Throws CycleDetected or DuplicateContradiction.
  static Poset from_pairs(std::size_t n, std::span<const Pair> pairs) {
    Poset p(n);
    p.pairs_.assign(pairs.begin(), pairs.end());
    for (const auto& [u, v] : pairs) {
      if (u >= n || v >= n) throw Error(Errc::InvalidArgument, "pair references agent outside 0.." + std::to_string(n - 1));
      if (u == v) throw Error(Errc::CycleDetected, "agent " + std::to_string(u) + " above itself");
      if (p.test(v, u)) {
        throw Error(Errc::DuplicateContradiction,
                    "both " + std::to_string(u) + ">" + std::to_string(v) + " and the reverse supplied");
      }
      p.set(u, v);
    }
    p.close();
    for (std::size_t v = 0; v < n; ++v) {
      if (p.test(v, v)) throw Error(Errc::CycleDetected, "closure places agent " + std::to_string(v) + " above itself");
    }
    return p;
  }

  /// Total order: ranking[0] is the best agent.
  static Poset chain(std::span<const AgentId> ranking) {
    std::vector<Pair> pairs;
    for (std::size_t i = 1; i < ranking.size(); ++i) pairs.emplace_back(ranking[i - 1], ranking[i]);
    return from_pairs(ranking.size(), pairs);
  }

  static Poset identity_chain(std::size_t n) {
    std::vector<AgentId> r(n);
    for (std::size_t i = 0; i < n; ++i) r[i] = static_cast<AgentId>(i);
    return chain(r);
  }

  static Poset antichain(std::size_t n) { return from_pairs(n, {}); }

  std::size_t size() const { return n_; }

  /// u is strictly better than v.
  bool greater(AgentId u, AgentId v) const { return test(u, v); }
  bool geq(AgentId u, AgentId v) const { return u == v || test(u, v); }
  bool incomparable(AgentId u, AgentId v) const { return u != v && !test(u, v) && !test(v, u); }

  const std::vector<Pair>& source_pairs() const { return pairs_; }

  /// Equality of the closed relations (source pairs may differ).
  bool same_relation(const Poset& o) const { return n_ == o.n_ && bits_ == o.bits_; }

  friend bool operator==(const Poset& a, const Poset& b) { return a.same_relation(b) && a.pairs_ == b.pairs_; }

 private:
  explicit Poset(std::size_t n) : n_(n), words_((n + 63) / 64), bits_(n * words_, 0) {}

  bool test(std::size_t u, std::size_t v) const { return (bits_[u * words_ + v / 64] >> (v % 64)) & 1U; }
  void set(std::size_t u, std::size_t v) { bits_[u * words_ + v / 64] |= (std::uint64_t{1} << (v % 64)); }

  void close() {
    for (std::size_t k = 0; k < n_; ++k) {
      const std::uint64_t* row_k = &bits_[k * words_];
      for (std::size_t i = 0; i < n_; ++i) {
        if (!test(i, k)) continue;
        std::uint64_t* row_i = &bits_[i * words_];
        for (std::size_t w = 0; w < words_; ++w) row_i[w] |= row_k[w];
      }
    }
  }

  std::size_t n_ = 0;
  std::size_t words_ = 0;
  std::vector<std::uint64_t> bits_;
  std::vector<Pair> pairs_;
};

inline Poset validate_poset(std::span<const Poset::Pair> pairs, std::size_t n) { return Poset::from_pairs(n, pairs); }

/// Number of agents incomparable to v.
inline std::size_t incomparable_count(const Poset& p, AgentId v) {
  std::size_t c = 0;
  for (AgentId u = 0; u < p.size(); ++u) c += p.incomparable(u, v);
  return c;
}

inline std::size_t kappa(const Poset& p) {
  std::size_t best = 0;
  for (AgentId v = 0; v < p.size(); ++v) best = std::max(best, incomparable_count(p, v));
  return best;
}

/// Maximum antichain size, via minimum chain cover (Dilworth).
inline std::size_t width(const Poset& p) {
  const std::size_t n = p.size();
  BipartiteMatcher m(n, n);
  for (AgentId u = 0; u < n; ++u)
    for (AgentId v = 0; v < n; ++v)
      if (p.greater(u, v)) m.add_edge(u, v);
  return n - m.solve();
}

/// An order in which no agent is placed before one that beats it, and
/// agents more than 2*kappa positions apart are strictly ordered.
struct LpoOrder {
  std::vector<AgentId> order;
  std::vector<std::size_t> position;  // position[agent] = index in order
  std::size_t kappa = 0;
};

inline LpoOrder lpo_order(const Poset& p) {
  const std::size_t n = p.size();
  std::vector<std::size_t> above(n, 0);
  for (AgentId u = 0; u < n; ++u)
    for (AgentId v = 0; v < n; ++v)
      if (p.greater(u, v)) ++above[v];

  std::priority_queue<AgentId, std::vector<AgentId>, std::greater<>> ready;
  for (AgentId v = 0; v < n; ++v)
    if (above[v] == 0) ready.push(v);

  LpoOrder out;
  out.kappa = kappa(p);
  out.position.assign(n, 0);
  while (!ready.empty()) {
    AgentId a = ready.top();
    ready.pop();
    out.position[a] = out.order.size();
    out.order.push_back(a);
    for (AgentId v = 0; v < n; ++v)
      if (p.greater(a, v) && --above[v] == 0) ready.push(v);
  }
  return out;
}

inline bool verify_lpo(std::span<const AgentId> order, const Poset& p) {
  const std::size_t n = p.size();
  if (order.size() != n) return false;
  std::vector<char> seen(n, 0);
  for (AgentId a : order) {
    if (a >= n || seen[a]) return false;
    seen[a] = 1;
  }
  const std::size_t k = kappa(p);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (p.greater(order[j], order[i])) return false;
      if (j > i + 2 * k && !p.greater(order[i], order[j])) return false;
    }
  }
  return true;
}

}  // namespace mdsr
