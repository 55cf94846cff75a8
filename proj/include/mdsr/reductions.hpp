#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mdsr/core.hpp"
#include "mdsr/stability.hpp"

namespace mdsr {

// ---------------------------------------------------------------------------
// Six-agent instance without a stable matching.

inline Instance instable_instance() {
  enum : AgentId { a, b, c, d, e, f };
  const std::vector<std::pair<AgentId, AgentId>> order = {
      {a, b}, {a, c}, {a, d}, {a, f}, {b, e}, {c, d}, {a, e}, {b, f},
      {c, e}, {b, d}, {d, e}, {b, c}, {c, f}, {d, f}, {e, f}};
  MasterListSets ml;
  for (auto [x, y] : order) ml.list.push_back(TupleSet{x, y});
  return Instance(3, {"a", "b", "c", "d", "e", "f"}, std::move(ml));
}

// ---------------------------------------------------------------------------
// Fragments built from a global sequence of 2-sets plus acceptable triples.

namespace detail {

/// Agents are added in master order (best first). Each agent's list is the
/// 2-set sequence filtered to the pairs completing one of its triples.
class FragmentBuilder {
 public:
  AgentId agent(std::string name) {
    names_.push_back(std::move(name));
    return static_cast<AgentId>(names_.size() - 1);
  }

  void pair(AgentId x, AgentId y) {
    TupleSet t{std::min(x, y), std::max(x, y)};
    if (seen_.insert(t).second) sequence_.push_back(t);
  }

  void triple(AgentId x, AgentId y, AgentId z) { triples_.push_back(Group{x, y, z}); }

  std::size_t size() const { return names_.size(); }
  const std::vector<Group>& triples() const { return triples_; }

  Instance build() const {
    const std::size_t n = names_.size();
    std::vector<std::set<TupleSet>> wanted(n);
    for (const auto& g : triples_)
      for (AgentId v : g) wanted[v].insert(g.without(v));
    PreferenceLists lists(n);
    for (AgentId v = 0; v < n; ++v) {
      for (const auto& t : sequence_)
        if (wanted[v].count(t)) lists[v].push_back(t);
      if (lists[v].size() != wanted[v].size())
        throw Error(Errc::PreconditionViolated, "acceptable pair of " + names_[v] + " missing from the sequence");
    }
    Acceptability acc = lists;
    return Instance(3, names_, MasterPoset{Poset::identity_chain(n), std::move(lists)}, std::move(acc));
  }

 private:
  std::vector<std::string> names_;
  std::vector<TupleSet> sequence_;
  std::set<TupleSet> seen_;
  std::vector<Group> triples_;
};

struct TieAgents {
  AgentId a, bj, bj1, c, c1, cp;
  std::array<AgentId, 9> dd;  // dd[1..8]; dd[0] unused
};

inline void tie_d_sequence(FragmentBuilder& fb, const TieAgents& t) {
  const auto& d = t.dd;
  const std::array<std::pair<AgentId, AgentId>, 15> seq = {{
      {d[1], d[2]}, {d[1], d[4]}, {d[2], d[3]}, {d[3], d[4]}, {d[1], d[6]}, {d[3], d[5]}, {d[4], d[5]}, {d[2], d[7]},
      {d[3], d[7]}, {d[1], d[8]}, {d[2], d[8]}, {d[4], d[6]}, {d[5], d[8]}, {d[5], t.c}, {d[8], t.c}}};
  for (auto [x, y] : seq) fb.pair(x, y);
}

inline void tie_a_part(FragmentBuilder& fb, const TieAgents& t) {
  fb.pair(t.a, t.c);
  fb.pair(t.a, t.c1);
  fb.pair(t.a, t.cp);
  fb.pair(t.bj, t.c);
  fb.pair(t.bj1, t.c1);
  fb.pair(t.bj, t.cp);
}

/// The six triples owned by the gadget.
inline void tie_own_triples(FragmentBuilder& fb, const TieAgents& t) {
  const auto& d = t.dd;
  fb.triple(t.a, t.bj, t.cp);
  fb.triple(t.c, d[5], d[8]);
  fb.triple(d[1], d[2], d[8]);
  fb.triple(d[1], d[4], d[6]);
  fb.triple(d[2], d[3], d[7]);
  fb.triple(d[3], d[4], d[5]);
}

struct CutoffAgents {
  AgentId a;
  std::array<AgentId, 7> x;  // x[2..6]
};

inline void cutoff_sequence(FragmentBuilder& fb, const CutoffAgents& g) {
  const auto& x = g.x;
  const std::array<std::pair<AgentId, AgentId>, 9> seq = {{
      {x[2], x[4]}, {g.a, x[5]}, {g.a, x[6]}, {x[3], x[4]}, {x[3], x[5]}, {x[2], x[6]}, {x[4], x[5]}, {x[4], x[6]},
      {x[5], x[6]}}};
  for (auto [p, q] : seq) fb.pair(p, q);
}

inline void cutoff_triples(FragmentBuilder& fb, const CutoffAgents& g) {
  fb.triple(g.a, g.x[5], g.x[6]);
  fb.triple(g.x[2], g.x[4], g.x[6]);
  fb.triple(g.x[3], g.x[4], g.x[5]);
}

}  // namespace detail

/// A standalone gadget instance together with the triples it introduces.
struct Fragment {
  Instance instance;
  std::vector<Group> own_sets;         // triples belonging to the gadget itself
  std::vector<Group> acceptable_sets;  // every acceptable triple of the instance
};

/// Cut-off gadget for agent `a`: a, x2..x6 and three acceptable triples.
inline Fragment cutoff_gadget(const std::string& a = "a") {
  detail::FragmentBuilder fb;
  detail::CutoffAgents g{};
  g.a = fb.agent(a);
  for (int k = 2; k <= 6; ++k) g.x[k] = fb.agent("x" + std::to_string(k) + "_" + a);
  detail::cutoff_sequence(fb, g);
  detail::cutoff_triples(fb, g);
  auto triples = fb.triples();
  return {fb.build(), triples, triples};
}

/// Tie gadget for a man i tying women j and j+1, with the neighbouring agents
/// a_i, b_j, b_{j+1}, c_{i,j}, c_{i,j+1} it attaches to.
inline Fragment tie_gadget(std::size_t i = 1, std::size_t j = 1) {
  const std::string ij = std::to_string(i) + "_" + std::to_string(j);
  const std::string ij1 = std::to_string(i) + "_" + std::to_string(j + 1);
  detail::FragmentBuilder fb;
  detail::TieAgents t{};
  for (int k = 1; k <= 8; ++k) t.dd[k] = fb.agent("d" + std::to_string(k) + "_" + ij);
  t.a = fb.agent("a" + std::to_string(i));
  t.bj = fb.agent("b" + std::to_string(j));
  t.bj1 = fb.agent("b" + std::to_string(j + 1));
  t.c = fb.agent("c" + ij);
  t.c1 = fb.agent("c" + ij1);
  t.cp = fb.agent("cp" + ij);
  detail::tie_d_sequence(fb, t);
  detail::tie_a_part(fb, t);
  fb.pair(t.a, t.bj);
  fb.pair(t.a, t.bj1);
  detail::tie_own_triples(fb, t);
  std::vector<Group> own = fb.triples();
  fb.triple(t.a, t.bj, t.c);
  fb.triple(t.a, t.bj1, t.c1);
  return {fb.build(), own, fb.triples()};
}

// ---------------------------------------------------------------------------
// 1-in-3 positive 3-occurrence SAT.

struct OneInThreeFormula {
  std::vector<std::string> variables;
  std::vector<std::array<std::size_t, 3>> clauses;  // 0-based variable indices
};

using Assignment = std::vector<bool>;

inline void validate_formula(const OneInThreeFormula& f) {
  std::vector<int> occurrences(f.variables.size(), 0);
  for (std::size_t j = 0; j < f.clauses.size(); ++j) {
    const auto& c = f.clauses[j];
    for (std::size_t v : c)
      if (v >= f.variables.size())
        throw Error(Errc::MalformedFormula, "clause " + std::to_string(j + 1) + " names an unknown variable");
    if (c[0] == c[1] || c[0] == c[2] || c[1] == c[2])
      throw Error(Errc::MalformedFormula, "clause " + std::to_string(j + 1) + " repeats a variable");
    for (std::size_t v : c) ++occurrences[v];
  }
  for (std::size_t i = 0; i < occurrences.size(); ++i)
    if (occurrences[i] != 3)
      throw Error(Errc::MalformedFormula, "variable " + f.variables[i] + " occurs " + std::to_string(occurrences[i]) +
                                              " times, expected 3");
}

/// Agent layout of the reduced instance.
struct SatLayout {
  std::size_t clauses = 0;
  std::size_t variables = 0;
  /// occurrence[j][l] = (variable, k) with k in 0..2, for literal l of clause j.
  std::vector<std::array<std::pair<std::size_t, std::size_t>, 3>> occurrence;

  explicit SatLayout(const OneInThreeFormula& f) : clauses(f.clauses.size()), variables(f.variables.size()) {
    std::vector<std::size_t> seen(variables, 0);
    for (const auto& c : f.clauses) {
      std::array<std::pair<std::size_t, std::size_t>, 3> row{};
      for (std::size_t l = 0; l < 3; ++l) row[l] = {c[l], seen[c[l]]++};
      occurrence.push_back(row);
    }
  }

  std::size_t size() const { return 2 * clauses + 21 * variables; }
  AgentId c(std::size_t j) const { return static_cast<AgentId>(2 * j); }
  AgentId d(std::size_t j) const { return static_cast<AgentId>(2 * j + 1); }
  AgentId x(std::size_t i, std::size_t k) const { return static_cast<AgentId>(2 * clauses + 21 * i + 7 * k); }
  /// p in 1..6
  AgentId z(std::size_t i, std::size_t k, std::size_t p) const { return static_cast<AgentId>(x(i, k) + p); }
  AgentId y(std::size_t j, std::size_t l) const {
    auto [i, k] = occurrence[j][l];
    return x(i, k);
  }
};

inline std::vector<TupleSet> sat_master_list(const SatLayout& L) {
  std::vector<TupleSet> out;
  std::set<TupleSet> seen;
  auto put = [&](AgentId p, AgentId q) {
    TupleSet t{std::min(p, q), std::max(p, q)};
    if (seen.insert(t).second) out.push_back(t);
  };
  for (std::size_t j = 0; j < L.clauses; ++j) {
    const AgentId c = L.c(j), d = L.d(j);
    put(c, d);
    put(L.y(j, 0), d);
    put(L.y(j, 2), c);
    put(L.y(j, 1), d);
    put(L.y(j, 1), c);
    put(L.y(j, 2), d);
    put(L.y(j, 0), c);
  }
  for (std::size_t i = 0; i < L.variables; ++i) {
    put(L.x(i, 0), L.x(i, 1));
    put(L.x(i, 1), L.x(i, 2));
    put(L.x(i, 0), L.x(i, 2));
    for (std::size_t k = 0; k < 3; ++k) {
      const AgentId x = L.x(i, k);
      auto z = [&](std::size_t p) { return L.z(i, k, p); };
      put(x, z(1)), put(x, z(2)), put(x, z(3)), put(x, z(5)), put(z(1), z(4)), put(z(2), z(3)), put(x, z(4));
      put(z(1), z(5)), put(z(2), z(4)), put(z(1), z(3)), put(z(3), z(4)), put(z(1), z(2)), put(z(2), z(5));
      put(z(3), z(5)), put(z(4), z(5)), put(x, z(6)), put(z(1), z(6)), put(z(2), z(6)), put(z(3), z(6));
      put(z(4), z(6)), put(z(5), z(6));
    }
  }
  const auto n = static_cast<AgentId>(L.size());
  for (AgentId p = 0; p < n; ++p)
    for (AgentId q = p + 1; q < n; ++q) put(p, q);
  return out;
}

inline Instance sat_reduce(const OneInThreeFormula& f) {
  validate_formula(f);
  SatLayout L(f);
  std::vector<std::string> names(L.size());
  for (std::size_t j = 0; j < L.clauses; ++j) {
    names[L.c(j)] = "c" + std::to_string(j + 1);
    names[L.d(j)] = "d" + std::to_string(j + 1);
  }
  for (std::size_t i = 0; i < L.variables; ++i)
    for (std::size_t k = 0; k < 3; ++k) {
      const std::string ik = std::to_string(i + 1) + "_" + std::to_string(k + 1);
      names[L.x(i, k)] = "x" + ik;
      for (std::size_t p = 1; p <= 6; ++p) names[L.z(i, k, p)] = "z" + ik + "_" + std::to_string(p);
    }
  return Instance(3, std::move(names), MasterListSets{sat_master_list(L)});
}

namespace detail {

/// Index of the literal set true in clause j, or nullopt unless exactly one is.
inline std::optional<std::size_t> single_true(const OneInThreeFormula& f, const Assignment& asg, std::size_t j) {
  std::optional<std::size_t> hit;
  for (std::size_t l = 0; l < 3; ++l) {
    if (!asg[f.clauses[j][l]]) continue;
    if (hit) return std::nullopt;
    hit = l;
  }
  return hit;
}

}  // namespace detail

inline Matching sat_forward_matching(const OneInThreeFormula& f, const Assignment& asg) {
  validate_formula(f);
  if (asg.size() != f.variables.size()) throw Error(Errc::InvalidAssignment, "assignment size differs from variable count");
  SatLayout L(f);
  Matching m;
  for (std::size_t j = 0; j < L.clauses; ++j) {
    auto l = detail::single_true(f, asg, j);
    if (!l) throw Error(Errc::InvalidAssignment, "clause " + std::to_string(j + 1) + " does not have exactly one true literal");
    m.groups.push_back(Group{L.c(j), L.d(j), L.y(j, *l)});
  }
  for (std::size_t i = 0; i < L.variables; ++i) {
    if (!asg[i]) m.groups.push_back(Group{L.x(i, 0), L.x(i, 1), L.x(i, 2)});
    for (std::size_t k = 0; k < 3; ++k) {
      m.groups.push_back(Group{L.z(i, k, 1), L.z(i, k, 2), L.z(i, k, 3)});
      m.groups.push_back(Group{L.z(i, k, 4), L.z(i, k, 5), L.z(i, k, 6)});
    }
  }
  m.canonicalize();
  return m;
}

/// Reads variable truth from which occurrence agents sit with clause pairs.
inline Assignment sat_backward_assignment(const OneInThreeFormula& f, const Matching& m) {
  validate_formula(f);
  SatLayout L(f);
  const auto where = group_index(m, L.size());
  std::vector<int> hits(L.variables, 0);
  for (std::size_t j = 0; j < L.clauses; ++j) {
    for (std::size_t l = 0; l < 3; ++l) {
      const AgentId y = L.y(j, l);
      if (where[y] < 0) continue;
      const Group& g = m.groups[static_cast<std::size_t>(where[y])];
      if (g.contains(L.c(j)) && g.contains(L.d(j))) ++hits[L.occurrence[j][l].first];
    }
  }
  Assignment asg(L.variables, false);
  for (std::size_t i = 0; i < L.variables; ++i) {
    if (hits[i] != 0 && hits[i] != 3)
      throw Error(Errc::NotWellFormed, "only " + std::to_string(hits[i]) + " occurrences of " + f.variables[i] +
                                           " sit with clause agents");
    asg[i] = hits[i] == 3;
  }
  for (std::size_t j = 0; j < L.clauses; ++j)
    if (!detail::single_true(f, asg, j))
      throw Error(Errc::NotWellFormed, "extracted assignment leaves clause " + std::to_string(j + 1) +
                                           " without exactly one true literal");
  return asg;
}

// ---------------------------------------------------------------------------
// Stable marriage with ties and master lists.

/// Men and women are listed in master order, best first. A tie joins woman j
/// and woman j+1 in the women's master list; each man's list is the master
/// list restricted to the women he accepts, and each woman accepts exactly
/// the men who accept her, ranked by the men's master list.
struct SmtiInstance {
  std::vector<std::string> men;
  std::vector<std::string> women;
  std::vector<bool> tied_with_next;                // per woman
  std::vector<std::vector<std::size_t>> accepts;   // per man, ascending woman indices

  friend bool operator==(const SmtiInstance&, const SmtiInstance&) = default;
};

/// (man, woman) pairs.
using SmtiMatching = std::vector<std::pair<std::size_t, std::size_t>>;

inline void validate_smti(const SmtiInstance& s) {
  auto fail = [](const std::string& why) { throw Error(Errc::MalformedSmti, why); };
  if (s.men.size() != s.women.size()) fail("numbers of men and women differ");
  if (s.tied_with_next.size() != s.women.size()) fail("tie markers must cover every woman");
  if (s.accepts.size() != s.men.size()) fail("every man needs an acceptance list");
  std::set<std::string> names;
  for (const auto* side : {&s.men, &s.women})
    for (const auto& nm : *side)
      if (nm.empty() || !names.insert(nm).second) fail("names must be nonempty and distinct");
  for (std::size_t j = 0; j < s.women.size(); ++j) {
    if (!s.tied_with_next[j]) continue;
    if (j + 1 >= s.women.size()) fail("last woman cannot be tied with a successor");
    if (j > 0 && s.tied_with_next[j - 1]) fail("ties may join at most two women");
  }
  for (const auto& list : s.accepts)
    for (std::size_t k = 0; k < list.size(); ++k) {
      if (list[k] >= s.women.size()) fail("unknown woman index");
      if (k > 0 && list[k] <= list[k - 1]) fail("acceptance lists must be strictly increasing");
    }
}

inline bool smti_acceptable(const SmtiInstance& s, std::size_t i, std::size_t j) {
  return std::binary_search(s.accepts[i].begin(), s.accepts[i].end(), j);
}

/// Whether man i ties woman j with woman j+1 in his own list.
inline bool smti_tie_starts(const SmtiInstance& s, std::size_t i, std::size_t j) {
  return s.tied_with_next[j] && smti_acceptable(s, i, j) && smti_acceptable(s, i, j + 1);
}

/// Rank of woman j for man i; tied women share a rank. Lower is better.
inline std::size_t smti_man_rank(const SmtiInstance& s, std::size_t i, std::size_t j) {
  return (j > 0 && smti_tie_starts(s, i, j - 1)) ? j - 1 : j;
}

inline void validate_smti_matching(const SmtiInstance& s, const SmtiMatching& pm) {
  std::vector<char> man(s.men.size(), 0), woman(s.women.size(), 0);
  for (auto [i, j] : pm) {
    if (i >= s.men.size() || j >= s.women.size()) throw Error(Errc::InvalidArgument, "matching names an unknown agent");
    if (man[i] || woman[j]) throw Error(Errc::InvalidArgument, "matching uses an agent twice");
    if (!smti_acceptable(s, i, j)) throw Error(Errc::InvalidArgument, "matching pairs an unacceptable couple");
    man[i] = woman[j] = 1;
  }
}

/// First (man, woman) pair that blocks pm under weak stability, if any.
inline std::optional<std::pair<std::size_t, std::size_t>> smti_blocking_pair(const SmtiInstance& s,
                                                                             const SmtiMatching& pm) {
  validate_smti_matching(s, pm);
  std::vector<std::optional<std::size_t>> wife(s.men.size()), husband(s.women.size());
  for (auto [i, j] : pm) wife[i] = j, husband[j] = i;
  for (std::size_t i = 0; i < s.men.size(); ++i)
    for (std::size_t j : s.accepts[i]) {
      if (wife[i] == j) continue;
      bool man_wants = !wife[i] || smti_man_rank(s, i, j) < smti_man_rank(s, i, *wife[i]);
      bool woman_wants = !husband[j] || i < *husband[j];
      if (man_wants && woman_wants) return std::pair{i, j};
    }
  return std::nullopt;
}

/// Reduced instance plus the agent indices the witness maps need.
struct SmtiReduction {
  Instance instance;
  std::vector<AgentId> a, b;
  std::map<std::pair<std::size_t, std::size_t>, AgentId> c;       // one per acceptable pair
  std::map<std::pair<std::size_t, std::size_t>, AgentId> c_prime;  // keyed by tie start
  std::map<std::pair<std::size_t, std::size_t>, std::array<AgentId, 9>> d;
  std::vector<std::array<AgentId, 7>> x;
};

inline SmtiReduction smti_reduce(const SmtiInstance& s) {
  validate_smti(s);
  const std::size_t n = s.men.size();
  detail::FragmentBuilder fb;
  auto tag = [](std::size_t i, std::size_t j) { return std::to_string(i + 1) + "_" + std::to_string(j + 1); };

  std::vector<std::pair<std::size_t, std::size_t>> ties;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j : s.accepts[i])
      if (smti_tie_starts(s, i, j)) ties.emplace_back(i, j);

  std::map<std::pair<std::size_t, std::size_t>, std::array<AgentId, 9>> dmap;
  for (auto ij : ties) {
    std::array<AgentId, 9> dd{};
    for (int k = 1; k <= 8; ++k) dd[k] = fb.agent("d" + std::to_string(k) + "_" + tag(ij.first, ij.second));
    dmap[ij] = dd;
  }
  std::vector<AgentId> a(n), b(n);
  for (std::size_t i = 0; i < n; ++i) a[i] = fb.agent("a" + std::to_string(i + 1));
  for (std::size_t j = 0; j < n; ++j) b[j] = fb.agent("b" + std::to_string(j + 1));

  std::map<std::pair<std::size_t, std::size_t>, AgentId> c, cp;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) {
      if (!smti_acceptable(s, i, j) || c.count({i, j})) continue;
      c[{i, j}] = fb.agent("c" + tag(i, j));
      if (smti_tie_starts(s, i, j)) {
        c[{i, j + 1}] = fb.agent("c" + tag(i, j + 1));
        cp[{i, j}] = fb.agent("cp" + tag(i, j));
      }
    }
  std::vector<std::array<AgentId, 7>> xs(n);
  for (std::size_t i = 0; i < n; ++i)
    for (int k = 2; k <= 6; ++k) xs[i][k] = fb.agent("x" + std::to_string(k) + "_" + std::to_string(i + 1));

  auto tie_agents = [&](std::size_t i, std::size_t j) {
    return detail::TieAgents{a[i], b[j], b[j + 1], c.at({i, j}), c.at({i, j + 1}), cp.at({i, j}), dmap.at({i, j})};
  };

  for (auto [i, j] : ties) detail::tie_d_sequence(fb, tie_agents(i, j));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j : s.accepts[i]) {
      if (smti_tie_starts(s, i, j)) {
        detail::tie_a_part(fb, tie_agents(i, j));
      } else if (!(j > 0 && smti_tie_starts(s, i, j - 1))) {
        fb.pair(a[i], c.at({i, j}));
        fb.pair(b[j], c.at({i, j}));
      }
    }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j : s.accepts[i]) fb.pair(a[i], b[j]);
  for (std::size_t i = 0; i < n; ++i) detail::cutoff_sequence(fb, {a[i], xs[i]});

  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j : s.accepts[i]) fb.triple(a[i], b[j], c.at({i, j}));
  for (auto [i, j] : ties) detail::tie_own_triples(fb, tie_agents(i, j));
  for (std::size_t i = 0; i < n; ++i) detail::cutoff_triples(fb, {a[i], xs[i]});

  return {fb.build(), std::move(a), std::move(b), std::move(c), std::move(cp), std::move(dmap), std::move(xs)};
}

/// Stable matching of the reduced instance built from a perfect weakly stable pm.
inline Matching smti_forward(const SmtiInstance& s, const SmtiReduction& r, const SmtiMatching& pm) {
  validate_smti_matching(s, pm);
  if (pm.size() != s.men.size()) throw Error(Errc::NotPerfect, "matching leaves someone single");
  if (auto bp = smti_blocking_pair(s, pm))
    throw Error(Errc::NotStable, "pair (" + s.men[bp->first] + ", " + s.women[bp->second] + ") blocks");

  Matching m;
  std::set<std::pair<std::size_t, std::size_t>> settled;
  for (auto [i, j] : pm) {
    m.groups.push_back(Group{r.a[i], r.b[j], r.c.at({i, j})});
    if (smti_tie_starts(s, i, j)) {
      const auto& dd = r.d.at({i, j});
      m.groups.push_back(Group{dd[1], dd[2], dd[8]});
      m.groups.push_back(Group{dd[3], dd[4], dd[5]});
      settled.insert({i, j});
    }
  }
  for (const auto& [ij, dd] : r.d) {
    if (settled.count(ij)) continue;
    m.groups.push_back(Group{r.c.at(ij), dd[5], dd[8]});
    m.groups.push_back(Group{dd[2], dd[3], dd[7]});
    m.groups.push_back(Group{dd[1], dd[4], dd[6]});
  }
  for (const auto& x : r.x) m.groups.push_back(Group{x[3], x[4], x[5]});
  m.canonicalize();
  return m;
}

inline Matching smti_forward(const SmtiInstance& s, const SmtiMatching& pm) { return smti_forward(s, smti_reduce(s), pm); }

/// Man-woman matching read off the triples holding both an a- and a b-agent.
inline SmtiMatching smti_backward(const SmtiInstance& s, const SmtiReduction& r, const Matching& m) {
  if (auto chk = validate_matching(r.instance, m); !chk) throw Error(Errc::NotWellFormed, chk.detail);
  const auto where = group_index(m, r.instance.size());
  std::map<AgentId, std::size_t> woman_of;
  for (std::size_t j = 0; j < r.b.size(); ++j) woman_of[r.b[j]] = j;
  SmtiMatching pm;
  for (std::size_t i = 0; i < r.a.size(); ++i) {
    if (where[r.a[i]] < 0) throw Error(Errc::NotWellFormed, "agent " + r.instance.name(r.a[i]) + " is unmatched");
    std::optional<std::size_t> wife;
    for (AgentId v : m.groups[static_cast<std::size_t>(where[r.a[i]])])
      if (auto it = woman_of.find(v); it != woman_of.end()) wife = it->second;
    if (!wife) throw Error(Errc::NotWellFormed, "agent " + r.instance.name(r.a[i]) + " is not grouped with a woman");
    pm.emplace_back(i, *wife);
  }
  if (auto bp = smti_blocking_pair(s, pm))
    throw Error(Errc::NotWellFormed, "extracted matching is blocked by (" + s.men[bp->first] + ", " +
                                         s.women[bp->second] + ")");
  return pm;
}

inline SmtiMatching smti_backward(const SmtiInstance& s, const Matching& m) { return smti_backward(s, smti_reduce(s), m); }

}  // namespace mdsr
