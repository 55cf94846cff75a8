#include <gtest/gtest.h>

#include "mdsr/core.hpp"
#include "support.hpp"

using namespace mdsr;
using namespace mdsr::testing;

namespace {

Poset small_poset() {
  std::vector<Poset::Pair> pairs{{0, 1}, {1, 2}, {0, 3}};
  return Poset::from_pairs(4, pairs);
}

Instance master_list_worked_example() {
  Names ag = numbered("a", 4);
  std::map<std::string, NamedList> l{
      {"a1", {{"a2", "a4"}, {"a3", "a4"}, {"a2", "a3"}}},
      {"a2", {{"a1", "a3"}, {"a3", "a4"}, {"a1", "a4"}}},
      {"a3", {{"a1", "a2"}, {"a2", "a4"}, {"a1", "a4"}}},
      {"a4", {{"a1", "a2"}, {"a1", "a3"}, {"a2", "a3"}}},
  };
  return explicit_instance(3, ag, l);
}

}  // namespace

TEST(Poset, ClosureAddsImpliedPair) {
  Poset p = small_poset();
  EXPECT_TRUE(p.greater(0, 2));
  EXPECT_TRUE(p.incomparable(2, 3));
  EXPECT_FALSE(p.greater(3, 0));
  EXPECT_EQ(p.source_pairs().size(), 3u);
}

TEST(Poset, EmptyPairsGiveAntichain) {
  Poset p = Poset::antichain(3);
  for (AgentId u = 0; u < 3; ++u)
    for (AgentId v = 0; v < 3; ++v)
      if (u != v) {
        EXPECT_TRUE(p.incomparable(u, v));
      }
}

TEST(Poset, RejectsBothDirections) {
  std::vector<Poset::Pair> pairs{{0, 1}, {1, 0}};
  try {
    validate_poset(pairs, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::DuplicateContradiction);
  }
}

TEST(Poset, RejectsCycleThroughClosure) {
  std::vector<Poset::Pair> pairs{{0, 1}, {1, 2}, {2, 0}};
  try {
    validate_poset(pairs, 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::CycleDetected);
  }
}

TEST(Poset, RejectsSelfPairAndOutOfRange) {
  std::vector<Poset::Pair> self{{1, 1}};
  EXPECT_THROW(validate_poset(self, 2), Error);
  std::vector<Poset::Pair> far{{0, 5}};
  EXPECT_THROW(validate_poset(far, 2), Error);
}

TEST(Dominates, Examples) {
  Poset chain = Poset::identity_chain(4);  // a=0 > b=1 > c=2 > d=3
  EXPECT_TRUE(dominates(chain, TupleSet{0, 2}, TupleSet{1, 3}));
  EXPECT_FALSE(dominates(chain, TupleSet{0, 2}, TupleSet{0, 2}));
  EXPECT_FALSE(dominates(chain, TupleSet{0, 3}, TupleSet{1, 2}));
  EXPECT_FALSE(dominates(chain, TupleSet{1, 2}, TupleSet{0, 3}));
}

TEST(Dominates, SizeMismatch) {
  Poset chain = Poset::identity_chain(4);
  try {
    dominates(chain, TupleSet{0}, TupleSet{1, 2});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::SizeMismatch);
  }
}

TEST(Dominates, NeedsMatchingNotGreedy) {
  // 0 > 2 only, 1 > 2 and 1 > 3: greedy pairing 1->2 strands 0.
  std::vector<Poset::Pair> pairs{{0, 2}, {1, 2}, {1, 3}};
  Poset p = Poset::from_pairs(4, pairs);
  EXPECT_TRUE(dominates(p, TupleSet{0, 1}, TupleSet{2, 3}));
}

TEST(Dominates, AgreesWithBijectionOracle) {
  std::mt19937_64 rng(7);
  for (int round = 0; round < 150; ++round) {
    const std::size_t n = 4 + round % 5;
    Poset p = (round % 2) ? random_two_dim_poset(rng, n, round % 7) : random_dag_poset(rng, n, 0.35);
    const std::size_t k = 2 + round % 2;
    std::vector<AgentId> all(n);
    std::iota(all.begin(), all.end(), 0);
    std::vector<TupleSet> sets;
    for_each_subset(all, k, [&](const std::vector<AgentId>& s) { sets.emplace_back(s); });
    for (const auto& t : sets)
      for (const auto& u : sets) ASSERT_EQ(dominates(p, t, u), oracle_dominates(p, t, u));
  }
}

TEST(CanonicalRank, Examples) {
  LpoOrder chain = lpo_order(Poset::identity_chain(4));
  EXPECT_EQ(canonical_rank(chain, TupleSet{1, 3}), (std::vector<std::size_t>{1, 3}));
  EXPECT_LT(canonical_rank(chain, TupleSet{0, 1}), canonical_rank(chain, TupleSet{0, 2}));
  LpoOrder lpo = lpo_order(small_poset());
  EXPECT_EQ(lpo.order, (std::vector<AgentId>{0, 1, 2, 3}));
  EXPECT_EQ(canonical_rank(lpo, TupleSet{0, 3}), (std::vector<std::size_t>{0, 3}));
}

TEST(CanonicalRank, ConsistentWithDominance) {
  std::mt19937_64 rng(11);
  for (int round = 0; round < 100; ++round) {
    const std::size_t n = 5 + round % 4;
    Poset p = random_dag_poset(rng, n, 0.4);
    LpoOrder lpo = lpo_order(p);
    std::vector<AgentId> all(n);
    std::iota(all.begin(), all.end(), 0);
    std::vector<TupleSet> sets;
    for_each_subset(all, 3, [&](const std::vector<AgentId>& s) { sets.emplace_back(s); });
    for (const auto& t : sets)
      for (const auto& u : sets)
        if (dominates(p, t, u)) {
          ASSERT_LT(canonical_rank(lpo, t), canonical_rank(lpo, u));
        }
  }
}

TEST(Prefers, ExplicitListOrder) {
  Instance ex = example_one();
  AgentId a = *ex.find("a");
  EXPECT_TRUE(ex.prefers(a, set_of(ex, {"b", "d"}), set_of(ex, {"b", "c"})));
  EXPECT_FALSE(ex.prefers(a, set_of(ex, {"b", "c"}), set_of(ex, {"b", "d"})));
}

TEST(Prefers, PreconditionErrors) {
  Instance ex = example_one();
  AgentId a = *ex.find("a");
  auto code_of = [&](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::InvalidArgument;
  };
  EXPECT_EQ(code_of([&] { ex.prefers(a, set_of(ex, {"b", "c"}), set_of(ex, {"b", "c"})); }), Errc::PreconditionViolated);
  EXPECT_EQ(code_of([&] { ex.prefers(a, set_of(ex, {"a", "c"}), set_of(ex, {"b", "c"})); }), Errc::SelfInclusion);
  EXPECT_EQ(code_of([&] { ex.prefers(a, set_of(ex, {"b"}), set_of(ex, {"b", "c"})); }), Errc::SizeMismatch);

  Names ag{"p", "q", "r", "s"};
  Instance inc = explicit_instance(3, ag, {{"p", {{"q", "r"}}}, {"q", {{"p", "r"}}}, {"r", {{"p", "q"}}}, {"s", {}}}, true);
  EXPECT_EQ(code_of([&] { inc.prefers(0, set_of(inc, {"q", "r"}), set_of(inc, {"q", "s"})); }), Errc::UnacceptableSet);
}

TEST(Prefers, MasterPosetChain) {
  Instance inst = chain_instance(5, 3);
  EXPECT_TRUE(inst.prefers(0, TupleSet{1, 2}, TupleSet{3, 4}));
  EXPECT_TRUE(inst.prefers(0, TupleSet{1, 2}, TupleSet{1, 3}));
  EXPECT_TRUE(inst.prefers(0, TupleSet{1, 3}, TupleSet{1, 4}));
}

TEST(Prefers, PosetOrderIsStrictTotalAndRespectsDominance) {
  std::mt19937_64 rng(3);
  for (int round = 0; round < 40; ++round) {
    const std::size_t n = 4 + round % 4;
    Poset p = random_dag_poset(rng, n, 0.3);
    Instance inst(3, numbered("v", n), MasterPoset{p, std::nullopt});
    for (AgentId a = 0; a < n; ++a) {
      std::vector<AgentId> others;
      for (AgentId x = 0; x < n; ++x)
        if (x != a) others.push_back(x);
      std::vector<TupleSet> sets;
      for_each_subset(others, 2, [&](const std::vector<AgentId>& s) { sets.emplace_back(s); });
      for (const auto& t : sets) {
        for (const auto& u : sets) {
          if (t == u) continue;
          bool tu = inst.prefers(a, t, u);
          ASSERT_NE(tu, inst.prefers(a, u, t));
          if (dominates(p, t, u)) {
            ASSERT_TRUE(tu);
          }
          for (const auto& w : sets) {
            if (w != t && w != u && tu && inst.prefers(a, u, w)) {
              ASSERT_TRUE(inst.prefers(a, t, w));
            }
          }
        }
      }
    }
  }
}

TEST(FirstChoice, ChainExamples) {
  Instance inst = chain_instance(6, 3);
  EXPECT_EQ(inst.first_choice(2, {}), (TupleSet{0, 1}));
  std::vector<AgentId> ex{1};
  EXPECT_EQ(inst.first_choice(0, ex), (TupleSet{2, 3}));
}

TEST(FirstChoice, PosetExample) {
  Instance inst(3, numbered("v", 4), MasterPoset{small_poset(), std::nullopt});
  EXPECT_EQ(inst.first_choice(2, {}), (TupleSet{0, 1}));
}

TEST(FirstChoice, InsufficientAgents) {
  Instance inst = chain_instance(4, 3);
  std::vector<AgentId> ex{1, 2};
  try {
    inst.first_choice(0, ex);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::InsufficientAgents);
  }
}

TEST(FirstChoice, EqualsMinimumOfPreferenceOrder) {
  std::mt19937_64 rng(5);
  for (int round = 0; round < 30; ++round) {
    const std::size_t n = 5 + round % 3;
    Poset p = random_two_dim_poset(rng, n, 2 + round % 5);
    Instance inst(3, numbered("v", n), MasterPoset{p, std::nullopt});
    auto lists = materialize_lists(inst);
    for (AgentId a = 0; a < n; ++a) {
      for (std::uint32_t mask = 0; mask < (1U << n); ++mask) {
        if (mask >> a & 1) continue;
        std::vector<AgentId> ex;
        for (AgentId x = 0; x < n; ++x)
          if (mask >> x & 1) ex.push_back(x);
        const TupleSet* expect = nullptr;
        for (const auto& t : lists[a]) {
          if (std::none_of(t.begin(), t.end(), [&](AgentId x) { return mask >> x & 1; })) {
            expect = &t;
            break;
          }
        }
        if (!expect) {
          EXPECT_THROW(inst.first_choice(a, ex), Error);
        } else {
          ASSERT_EQ(inst.first_choice(a, ex), *expect);
        }
      }
    }
  }
}

TEST(FirstChoice, ExplicitScan) {
  Instance ex = example_one();
  std::vector<AgentId> excluded{*ex.find("d")};
  EXPECT_EQ(ex.first_choice(*ex.find("a"), excluded), set_of(ex, {"b", "c"}));
}

TEST(MasterList, WorkedExampleIsDerived) {
  Names ag = numbered("a", 4);
  auto master = list_of(ag, {{"a1", "a2"}, {"a2", "a4"}, {"a1", "a3"}, {"a3", "a4"}, {"a2", "a3"}, {"a1", "a4"}});
  Instance inst = master_list_worked_example();
  EXPECT_TRUE(is_derived_from_master_list(inst, master));
  Instance as_master(3, ag, MasterListSets{master});
  EXPECT_TRUE(is_derived_from_master_list(as_master));
  EXPECT_EQ(materialize_lists(as_master), materialize_lists(inst));
}

TEST(MasterList, ExampleOneOnlyLastThreeFollowLexicographicList) {
  Instance ex = example_one();
  auto master = lexicographic_pairs(6);
  for (const char* who : {"d", "e", "f"}) EXPECT_TRUE(agent_follows_master_list(ex, *ex.find(who), master)) << who;
  for (const char* who : {"a", "b", "c"}) EXPECT_FALSE(agent_follows_master_list(ex, *ex.find(who), master)) << who;
  EXPECT_FALSE(is_derived_from_master_list(ex, master));
}

TEST(MasterList, SwappedEntriesBreakDerivation) {
  Names ag = numbered("a", 3);
  auto master = list_of(ag, {{"a1"}, {"a2"}, {"a3"}});
  Instance ok = explicit_instance(2, ag, {{"a1", {{"a2"}, {"a3"}}}, {"a2", {{"a1"}, {"a3"}}}, {"a3", {{"a1"}, {"a2"}}}});
  Instance bad = explicit_instance(2, ag, {{"a1", {{"a3"}, {"a2"}}}, {"a2", {{"a1"}, {"a3"}}}, {"a3", {{"a1"}, {"a2"}}}});
  EXPECT_TRUE(is_derived_from_master_list(ok, master));
  EXPECT_FALSE(is_derived_from_master_list(bad, master));
}

TEST(MasterList, RequiresMasterSource) {
  EXPECT_THROW(is_derived_from_master_list(example_one()), Error);
}

TEST(DerivedFromPoset, ExampleOneAgainstChain) {
  Instance ex = example_one();
  Poset chain = Poset::identity_chain(6);
  auto lists = materialize_lists(ex);
  for (const char* who : {"c", "d", "e", "f"}) EXPECT_TRUE(agent_derived_from_poset(lists[*ex.find(who)], chain)) << who;
  EXPECT_FALSE(agent_derived_from_poset(lists[*ex.find("a")], chain));
  EXPECT_FALSE(is_derived_from_poset(ex, chain));
  EXPECT_TRUE(is_derived_from_poset(ex, Poset::antichain(6)));
}

TEST(DerivedFromPoset, ChainExampleAdmitsBothCompletions) {
  Poset chain = Poset::identity_chain(5);
  std::vector<TupleSet> first{{1, 2}, {1, 3}, {1, 4}, {2, 3}, {2, 4}, {3, 4}};
  std::vector<TupleSet> second{{1, 2}, {1, 3}, {2, 3}, {1, 4}, {2, 4}, {3, 4}};
  EXPECT_TRUE(agent_derived_from_poset(first, chain));
  EXPECT_TRUE(agent_derived_from_poset(second, chain));
  std::vector<TupleSet> wrong{{1, 3}, {1, 2}, {1, 4}, {2, 3}, {2, 4}, {3, 4}};
  EXPECT_FALSE(agent_derived_from_poset(wrong, chain));
}

TEST(ValidateMatching, Examples) {
  Instance ex = example_one();
  EXPECT_TRUE(validate_matching(ex, matching_of(ex, {{"a", "b", "d"}, {"c", "e", "f"}})));
  auto overlap = validate_matching(ex, matching_of(ex, {{"a", "b", "c"}, {"c", "e", "f"}}));
  EXPECT_FALSE(overlap);
  EXPECT_NE(overlap.detail.find("two groups"), std::string::npos);
  EXPECT_FALSE(validate_matching(ex, matching_of(ex, {{"a", "b"}})));
}

TEST(ValidateMatching, RespectsAcceptability) {
  Names ag{"p", "q", "r", "s"};
  Instance inc = explicit_instance(3, ag, {{"p", {{"q", "r"}}}, {"q", {{"p", "r"}}}, {"r", {{"p", "q"}}}, {"s", {}}}, true);
  EXPECT_TRUE(validate_matching(inc, matching_of(inc, {{"p", "q", "r"}})));
  EXPECT_FALSE(validate_matching(inc, matching_of(inc, {{"p", "q", "s"}})));
}

TEST(InstanceValidation, RejectsBadInputs) {
  Names ag{"p", "q", "r"};
  auto code_of = [&](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::InvalidArgument;
  };
  EXPECT_EQ(code_of([&] { explicit_instance(2, ag, {{"p", {{"p"}, {"q"}}}, {"q", {{"p"}, {"r"}}}, {"r", {{"p"}, {"q"}}}}); }),
            Errc::SelfInclusion);
  EXPECT_EQ(code_of([&] { explicit_instance(2, ag, {{"p", {{"q"}}}, {"q", {{"p"}, {"r"}}}, {"r", {{"p"}, {"q"}}}}); }),
            Errc::Incomplete);
  EXPECT_EQ(code_of([&] { explicit_instance(2, ag, {{"p", {{"q"}, {"q"}}}, {"q", {{"p"}, {"r"}}}, {"r", {{"p"}, {"q"}}}}); }),
            Errc::ValidationError);
  EXPECT_EQ(code_of([&] { Instance(2, Names{"p", "p"}, MasterPoset{Poset::antichain(2), std::nullopt}); }),
            Errc::ValidationError);
  EXPECT_EQ(code_of([&] { Instance(3, ag, MasterListSets{list_of(ag, {{"p", "q"}, {"q", "r"}})}); }),
            Errc::ValidationError);
  EXPECT_EQ(code_of([&] { Instance(1, ag, MasterPoset{Poset::antichain(3), std::nullopt}); }), Errc::ValidationError);

  // A completion that ranks a dominated set first is rejected.
  PreferenceLists comp(3);
  comp[0] = {TupleSet{2}, TupleSet{1}};
  comp[1] = {TupleSet{0}, TupleSet{2}};
  comp[2] = {TupleSet{0}, TupleSet{1}};
  EXPECT_EQ(code_of([&] { Instance(2, ag, MasterPoset{Poset::identity_chain(3), comp}); }), Errc::ValidationError);
  comp[0] = {TupleSet{1}, TupleSet{2}};
  EXPECT_NO_THROW(Instance(2, ag, MasterPoset{Poset::identity_chain(3), comp}));

  // Acceptability on a non-total poset.
  Acceptability acc(3);
  EXPECT_EQ(code_of([&] { Instance(2, ag, MasterPoset{Poset::antichain(3), std::nullopt}, acc); }), Errc::NotStrictOrder);
}
