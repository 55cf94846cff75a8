#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mdsr/core.hpp"
#include "mdsr/stability.hpp"

namespace mdsr {

// ---------------------------------------------------------------- strict order

/// Consecutive blocks of d along the ranking; the last n mod d agents stay unmatched.
inline Matching strict_order_solve(std::span<const AgentId> ranking, std::size_t d) {
  if (d < 2) throw Error(Errc::InvalidArgument, "group size must be at least 2");
  std::vector<char> seen(ranking.size(), 0);
  for (AgentId a : ranking) {
    if (a >= ranking.size() || seen[a]) throw Error(Errc::InvalidArgument, "ranking is not a permutation");
    seen[a] = 1;
  }
  Matching m;
  m.groups.reserve(ranking.size() / d);
  for (std::size_t start = 0; start + d <= ranking.size(); start += d)
    m.groups.emplace_back(std::vector<AgentId>(ranking.begin() + static_cast<std::ptrdiff_t>(start),
                                               ranking.begin() + static_cast<std::ptrdiff_t>(start + d)));
  return m;
}

inline Matching strict_order_solve(const Instance& inst) {
  if (!inst.poset()) throw Error(Errc::PreconditionViolated, "strict-order solving needs a master poset");
  if (!inst.complete()) throw Error(Errc::Incomplete, "strict-order solving needs complete preferences");
  if (inst.lpo()->kappa != 0) throw Error(Errc::NotStrictOrder, "master poset is not a total order");
  return strict_order_solve(inst.lpo()->order, inst.d());
}

// ---------------------------------------------------------------- parameters

/// Largest gap between consecutive members of a group in any stable matching, in lpo positions.
constexpr std::size_t locality_bound(std::size_t kappa, std::size_t d) {
  return 2 * kappa * d * d + 4 * kappa + 3 * d + 1;
}

/// Window length k used by the dynamic program.
constexpr std::size_t dp_window(std::size_t kappa, std::size_t d) { return 2 * d * (d - 1) * locality_bound(kappa, d); }

/// Whether 4k * 2^(4k) <= d, the condition under which a stable matching always exists.
constexpr bool greedy_applies(std::size_t kappa, std::size_t d) {
  if (kappa == 0) return true;
  if (4 * kappa >= 60) return false;
  return 4 * kappa * (std::uint64_t{1} << (4 * kappa)) <= d;
}

// ---------------------------------------------------------------- dynamic program

struct DpOptions {
  std::size_t window_cap = 18;               // most agents a window may hold
  std::uint64_t max_states = 5'000'000;      // table entries summed over all windows
  // Experimental overrides. Below the derived values the verdict is no longer exact.
  std::optional<std::size_t> window;
  std::optional<std::size_t> max_gap;
};

struct DpStats {
  std::size_t k = 0;              // window length used
  std::size_t gap = 0;            // locality gap used
  std::size_t window_agents = 0;  // agents per window
  std::size_t windows = 0;
  std::uint64_t states = 0;       // table entries with value 1
  bool exact = true;              // false when overrides shrink k or the gap
};

struct DpResult {
  std::optional<Matching> matching;
  DpStats stats;
};

namespace detail {

class WindowDp {
 public:
  using PosGroup = std::vector<std::uint32_t>;

  WindowDp(const Instance& inst, const DpOptions& opt) : inst_(inst), lpo_(*inst.lpo()), opt_(opt) {
    n_ = inst.size();
    d_ = inst.d();
    const std::size_t kappa = lpo_.kappa;
    stats_.gap = opt.max_gap.value_or(locality_bound(kappa, d_));
    stats_.k = opt.window.value_or(dp_window(kappa, d_));
    stats_.exact = stats_.gap >= locality_bound(kappa, d_) && stats_.k >= dp_window(kappa, d_);
    if (stats_.gap == 0) throw Error(Errc::InvalidArgument, "locality gap must be positive");
    span_ = (d_ - 1) * stats_.gap;
    if (stats_.k < span_)
      throw Error(Errc::InvalidArgument, "window must be at least (d-1) times the locality gap");
    last_ = std::min<std::size_t>(stats_.k, n_ - 1);
    stats_.window_agents = last_ + 1;
    if (stats_.window_agents > opt.window_cap)
      throw Error(Errc::WindowTooLarge, "window of " + std::to_string(stats_.window_agents) + " agents exceeds the cap of " +
                                            std::to_string(opt.window_cap));
  }

  DpResult run() {
    DpResult out;
    layers_.emplace_back();
    first_window();
    const std::size_t starts = n_ - last_;
    for (std::size_t s = 1; s < starts && !layers_.back().states.empty(); ++s) advance(s);
    stats_.windows = layers_.size();
    if (layers_.size() == starts && !layers_.back().states.empty()) out.matching = reconstruct();
    out.stats = stats_;
    return out;
  }

 private:
  struct State {
    std::vector<PosGroup> groups;  // every group meeting the window
    std::int64_t pred = -1;
  };
  struct Layer {
    std::vector<State> states;
    std::unordered_map<std::string, std::size_t> index;
  };

  // Position status inside a bounded range: -2 unmatched, -1 undecided, else group slot.
  struct Status {
    std::size_t lo = 0;
    std::vector<int> slot;
    std::vector<const PosGroup*> groups;
    int at(std::size_t p) const { return (p < lo || p >= lo + slot.size()) ? -1 : slot[p - lo]; }
    void set(std::size_t p, int v) { slot[p - lo] = v; }
  };

  AgentId agent(std::size_t p) const { return lpo_.order[p]; }

  // Whether the agent at position p prefers cand minus p to cur minus p.
  bool prefers(std::size_t p, const PosGroup& cand, const PosGroup& cur) const {
    if (inst_.canonical()) {
      // Canonical preferences compare sorted positions directly.
      for (std::size_t i = 0, j = 0; i < cand.size() || j < cur.size();) {
        if (i < cand.size() && cand[i] == p) { ++i; continue; }
        if (j < cur.size() && cur[j] == p) { ++j; continue; }
        if (cand[i] != cur[j]) return cand[i] < cur[j];
        ++i;
        ++j;
      }
      return false;
    }
    auto to_set = [&](const PosGroup& g) {
      std::vector<AgentId> ids;
      for (auto q : g)
        if (q != p) ids.push_back(agent(q));
      return TupleSet(std::move(ids));
    };
    return inst_.prefers_unchecked(agent(p), to_set(cand), to_set(cur));
  }

  bool blocks(const PosGroup& cand, const Status& st) const {
    for (auto p : cand) {
      int s = st.at(p);
      if (s == -2) continue;
      const PosGroup& cur = *st.groups[static_cast<std::size_t>(s)];
      if (cur == cand || !prefers(p, cand, cur)) return false;
    }
    return true;
  }

  // Any blocking d-set among the decided positions in [lo, hi] that uses one of `fresh`.
  bool blocked(const Status& st, std::size_t lo, std::size_t hi, const std::vector<std::uint32_t>& fresh) const {
    std::vector<std::uint32_t> decided;
    for (std::size_t p = lo; p <= hi; ++p)
      if (st.at(p) != -1) decided.push_back(static_cast<std::uint32_t>(p));
    if (decided.size() < d_) return false;
    std::vector<std::size_t> idx(d_);
    for (std::size_t i = 0; i < d_; ++i) idx[i] = i;
    PosGroup cand(d_);
    do {
      bool uses_fresh = false;
      for (std::size_t i = 0; i < d_; ++i) {
        cand[i] = decided[idx[i]];
        uses_fresh = uses_fresh || std::binary_search(fresh.begin(), fresh.end(), cand[i]);
      }
      if (uses_fresh && blocks(cand, st)) return true;
    } while (next_combination(idx, decided.size()));
    return false;
  }

  // Calls fn(group) for each local group with minimum position p whose other members are free.
  template <class Free, class Fn>
  void for_each_new_group(std::size_t p, Free&& is_free, Fn&& fn) const {
    PosGroup g{static_cast<std::uint32_t>(p)};
    auto rec = [&](auto&& self) -> void {
      if (g.size() == d_) {
        fn(static_cast<const PosGroup&>(g));
        return;
      }
      const std::size_t prev = g.back();
      for (std::size_t q = prev + 1; q <= prev + stats_.gap && q < n_; ++q) {
        if (!is_free(q)) continue;
        g.push_back(static_cast<std::uint32_t>(q));
        self(self);
        g.pop_back();
      }
    };
    rec(rec);
  }

  std::string key(const std::vector<PosGroup>& groups) const {
    std::vector<PosGroup> sorted = groups;
    std::sort(sorted.begin(), sorted.end());
    std::string k;
    for (const auto& g : sorted) {
      k.append(reinterpret_cast<const char*>(g.data()), g.size() * sizeof(std::uint32_t));
    }
    return k;
  }

  void insert(Layer& layer, std::vector<PosGroup> groups, std::int64_t pred) {
    std::sort(groups.begin(), groups.end());
    std::string k = key(groups);
    if (layer.index.count(k)) return;
    if (++stats_.states > opt_.max_states) throw Error(Errc::TooLarge, "dynamic program exceeded its state budget");
    layer.index.emplace(std::move(k), layer.states.size());
    layer.states.push_back({std::move(groups), pred});
  }

  void first_window() {
    Status st;
    st.lo = 0;
    st.slot.assign(std::min(n_, last_ + 1 + span_), -1);
    std::vector<PosGroup> groups;
    groups.reserve(last_ + 1);
    auto rec = [&](auto&& self, std::size_t p) -> void {
      while (p <= last_ && st.at(p) != -1) ++p;
      if (p > last_) {
        insert(layers_.back(), groups, -1);
        return;
      }
      auto is_free = [&](std::size_t q) { return st.at(q) == -1; };
      for_each_new_group(p, is_free, [&](const PosGroup& g) {
        groups.push_back(g);
        refresh(st, groups);
        std::vector<std::uint32_t> fresh;
        for (auto q : g)
          if (q <= last_) fresh.push_back(q);
        if (!blocked(st, 0, last_, fresh)) self(self, p + 1);
        groups.pop_back();
        for (auto q : g) st.set(q, -1);
        refresh(st, groups);
      });
      st.set(p, -2);
      if (!blocked(st, 0, last_, {static_cast<std::uint32_t>(p)})) self(self, p + 1);
      st.set(p, -1);
    };
    rec(rec, 0);
  }

  // Re-point group slots after the group vector changed.
  static void refresh(Status& st, const std::vector<PosGroup>& groups) {
    st.groups.clear();
    for (std::size_t i = 0; i < groups.size(); ++i) {
      st.groups.push_back(&groups[i]);
      for (auto q : groups[i]) st.set(q, static_cast<int>(i));
    }
  }

  void advance(std::size_t s) {
    const Layer& prev = layers_.back();
    Layer next;
    const std::size_t q = s + last_;
    const std::size_t lo = s - 1;
    const std::size_t base = lo >= span_ ? lo - span_ : 0;
    for (std::size_t idx = 0; idx < prev.states.size(); ++idx) {
      const State& from = prev.states[idx];
      Status st;
      st.lo = base;
      st.slot.assign(std::min(n_, q + span_ + 1) - base, -1);
      std::vector<PosGroup> groups = from.groups;
      for (std::size_t p = lo; p < q; ++p) st.set(p, -2);
      refresh(st, groups);

      auto keep = [&](const std::vector<PosGroup>& all) {
        std::vector<PosGroup> kept;
        for (const auto& g : all)
          if (g.back() >= s) kept.push_back(g);
        return kept;
      };

      if (st.at(q) >= 0) {
        if (!blocked(st, lo, q, {static_cast<std::uint32_t>(q)})) insert(next, keep(groups), static_cast<std::int64_t>(idx));
        continue;
      }
      st.set(q, -2);
      if (!blocked(st, lo, q, {static_cast<std::uint32_t>(q)})) insert(next, keep(groups), static_cast<std::int64_t>(idx));
      st.set(q, -1);
      auto is_free = [&](std::size_t x) { return st.at(x) == -1; };
      for_each_new_group(q, is_free, [&](const PosGroup& g) {
        groups.push_back(g);
        refresh(st, groups);
        if (!blocked(st, lo, q, {static_cast<std::uint32_t>(q)})) insert(next, keep(groups), static_cast<std::int64_t>(idx));
        groups.pop_back();
        for (auto x : g) st.set(x, -1);
        refresh(st, groups);
      });
    }
    layers_.push_back(std::move(next));
  }

  Matching reconstruct() const {
    std::set<PosGroup> all;
    std::int64_t at = 0;
    for (std::size_t l = layers_.size(); l-- > 0;) {
      const State& st = layers_[l].states[static_cast<std::size_t>(at)];
      all.insert(st.groups.begin(), st.groups.end());
      at = st.pred;
    }
    Matching m;
    for (const auto& g : all) {
      std::vector<AgentId> ids;
      for (auto p : g) ids.push_back(agent(p));
      m.groups.emplace_back(std::move(ids));
    }
    return m.canonicalize();
  }

  const Instance& inst_;
  const LpoOrder& lpo_;
  DpOptions opt_;
  std::size_t n_ = 0, d_ = 0, span_ = 0, last_ = 0;
  DpStats stats_;
  std::vector<Layer> layers_;
};

}  // namespace detail

/// Sliding-window dynamic program over local matchings in lpo order.
inline DpResult fpt_dp_search(const Instance& inst, const DpOptions& opt = {}) {
  if (!inst.poset()) throw Error(Errc::PreconditionViolated, "the dynamic program needs a master poset");
  if (!inst.complete()) throw Error(Errc::Incomplete, "the dynamic program needs complete preferences");
  if (inst.size() < inst.d()) return {Matching{}, {}};
  return detail::WindowDp(inst, opt).run();
}

inline std::optional<Matching> fpt_dp_solve(const Instance& inst, const DpOptions& opt = {}) {
  return fpt_dp_search(inst, opt).matching;
}

// ---------------------------------------------------------------- greedy for large d

struct GreedyStep {
  Group group;
  std::size_t multiplicity = 0;  // how many candidate agents proposed this group
};

struct GreedyResult {
  Matching matching;
  std::vector<GreedyStep> steps;
  std::size_t threshold = 0;  // multiplicity every step had to reach
};

inline GreedyResult greedy_big_d_search(const Instance& inst) {
  if (!inst.poset()) throw Error(Errc::PreconditionViolated, "the greedy solver needs a master poset");
  if (!inst.complete()) throw Error(Errc::Incomplete, "the greedy solver needs complete preferences");
  const LpoOrder& lpo = *inst.lpo();
  const std::size_t d = inst.d();
  const std::size_t kappa = lpo.kappa;
  if (!greedy_applies(kappa, d))
    throw Error(Errc::PreconditionViolated, "4k*2^(4k) exceeds d for k = " + std::to_string(kappa));

  GreedyResult out;
  out.threshold = kappa == 0 ? 1 : 4 * kappa;
  std::vector<AgentId> remaining = lpo.order;
  std::vector<AgentId> matched;
  while (remaining.size() >= d) {
    std::map<Group, std::size_t> votes;
    const std::size_t proposers = d - 2 * kappa;
    for (std::size_t i = 0; i < proposers; ++i) {
      AgentId a = remaining[i];
      ++votes[inst.first_choice(a, matched).with(a)];
    }
    const Group* best = nullptr;
    std::size_t best_votes = 0;
    for (const auto& [g, v] : votes) {
      if (v > best_votes || (v == best_votes && canonical_rank(lpo, g) < canonical_rank(lpo, *best))) {
        best = &g;
        best_votes = v;
      }
    }
    if (best_votes < out.threshold)
      throw Error(Errc::CertificateFailure, "no group reached multiplicity " + std::to_string(out.threshold));
    out.steps.push_back({*best, best_votes});
    out.matching.groups.push_back(*best);
    matched.insert(matched.end(), best->begin(), best->end());
    std::erase_if(remaining, [&](AgentId a) { return best->contains(a); });
  }
  return out;
}

inline Matching greedy_big_d_solve(const Instance& inst) { return greedy_big_d_search(inst).matching; }

// ---------------------------------------------------------------- dispatcher

enum class Algorithm { Strict, Greedy, Dp, Brute };

constexpr std::string_view algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::Strict: return "strict";
    case Algorithm::Greedy: return "greedy";
    case Algorithm::Dp: return "dp";
    case Algorithm::Brute: return "brute";
  }
  return "unknown";
}

inline Algorithm choose_algorithm(const Instance& inst) {
  if (!inst.poset() || !inst.complete()) return Algorithm::Brute;
  const std::size_t kappa = inst.lpo()->kappa;
  if (kappa == 0) return Algorithm::Strict;
  if (greedy_applies(kappa, inst.d())) return Algorithm::Greedy;
  return Algorithm::Dp;
}

struct SolveOutcome {
  Algorithm algorithm = Algorithm::Brute;
  std::optional<Matching> matching;
};

inline SolveOutcome auto_solve(const Instance& inst, const DpOptions& dp = {}, const BruteForceLimits& brute = {}) {
  SolveOutcome out{choose_algorithm(inst), std::nullopt};
  switch (out.algorithm) {
    case Algorithm::Strict: out.matching = strict_order_solve(inst); break;
    case Algorithm::Greedy: out.matching = greedy_big_d_solve(inst); break;
    case Algorithm::Dp: out.matching = fpt_dp_solve(inst, dp); break;
    case Algorithm::Brute: out.matching = brute_force_solve(inst, brute); break;
  }
  return out;
}

}  // namespace mdsr
