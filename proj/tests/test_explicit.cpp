#include <gtest/gtest.h>

#include <map>

#include "support.hpp"
#include "vspace/errors.hpp"
#include "vspace/explicit.hpp"
#include "vspace/reference.hpp"

namespace vs {
namespace {

Mask m(std::initializer_list<int> bits) {
  Mask out = 0;
  for (int b : bits) out |= Mask{1} << b;
  return out;
}

// f = 0, g = 1, h = 2; rows copied from the published table.
const std::vector<Mask> kCyclicTable = {
    m({0, 1, 2}), m({2}), m({0}), m({2}), m({1}), m({1}), m({0}), 0,
};

// a, b, c, d = 0..3, indexed by mask.
std::vector<Mask> square_table() {
  std::map<std::string, std::string> rows = {
      {"", "abcd"}, {"a", "bcd"}, {"b", "acd"}, {"c", "abd"}, {"d", "abc"}, {"ab", "cd"},
      {"ac", ""},   {"ad", "bc"}, {"bc", "ad"}, {"bd", ""},   {"cd", "ab"}, {"abc", ""},
      {"abd", ""},  {"acd", ""},  {"bcd", ""},  {"abcd", ""}};
  const auto to_mask = [](const std::string& s) {
    Mask out = 0;
    for (char ch : s) out |= Mask{1} << (ch - 'a');
    return out;
  };
  std::vector<Mask> table(16, 0);
  for (const auto& [g, v] : rows) table[to_mask(g)] = to_mask(v);
  return table;
}

TEST(ExplicitSpace, RejectsMalformedTables) {
  EXPECT_THROW(ExplicitViolatorSpace({0, 0, 0}), InvalidInstance);
  EXPECT_THROW(ExplicitViolatorSpace({0, 2}), InvalidInstance);
  EXPECT_THROW(ExplicitViolatorSpace({0, 0}, {"a", "b"}), InvalidInstance);
  EXPECT_EQ(ExplicitViolatorSpace({1, 0}).names(), std::vector<std::string>{"a"});
}

TEST(ExplicitSpace, CyclicFixtureMatchesPublishedTable) {
  const auto s = fixtures::cyclic_three();
  EXPECT_EQ(std::vector<Mask>(s.table().begin(), s.table().end()), kCyclicTable);
  EXPECT_EQ(s.names(), (std::vector<std::string>{"f", "g", "h"}));
}

TEST(ExplicitSpace, SquareFixtureMatchesPublishedTable) {
  const auto s = fixtures::square();
  EXPECT_EQ(std::vector<Mask>(s.table().begin(), s.table().end()), square_table());
}

TEST(Axioms, PublishedFixturesAreViolatorSpaces) {
  EXPECT_FALSE(check_axioms(fixtures::cyclic_three()));
  EXPECT_FALSE(check_axioms(fixtures::square()));
}

TEST(Axioms, ConsistencyWitness) {
  // V({a}) contains a.
  const ExplicitViolatorSpace s({0b11, 0b01, 0, 0});
  const auto w = check_axioms(s);
  ASSERT_TRUE(w);
  EXPECT_EQ(w->axiom, Axiom::consistency);
  EXPECT_EQ(w->G, 0b01u);
}

TEST(Axioms, LocalityWitness) {
  // V({}) = {} but V({a}) = {b}: F = {} inside G = {a}, G misses V(F), values differ.
  const ExplicitViolatorSpace s({0, 0b10, 0, 0});
  const auto w = check_axioms(s);
  ASSERT_TRUE(w);
  EXPECT_EQ(w->axiom, Axiom::locality);
  EXPECT_EQ(w->F, 0u);
  EXPECT_EQ(w->G, 0b01u);
}

TEST(Axioms, AgreesWithBruteForceOnRandomTables) {
  Rng rng(17);
  int accepted = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng.below(std::uint64_t{4});
    std::vector<Mask> table(std::size_t{1} << n);
    const Mask full = static_cast<Mask>((1u << n) - 1);
    // Mostly consistent random tables so locality gets exercised.
    for (std::size_t g = 0; g < table.size(); ++g) table[g] = static_cast<Mask>(rng.next()) & full & ~static_cast<Mask>(g);
    const ExplicitViolatorSpace s(table);
    const bool ok = !check_axioms(s);
    EXPECT_EQ(ok, test::brute_consistent(s) && test::brute_local(s));
    EXPECT_EQ(check_axioms(s).has_value(), reference::check_axioms(s).has_value());
    accepted += ok;
  }
  EXPECT_GT(accepted, 0);
}

TEST(Axioms, WitnessIsAGenuineFailure) {
  Rng rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.below(std::uint64_t{4});
    std::vector<Mask> table(std::size_t{1} << n);
    for (std::size_t g = 0; g < table.size(); ++g) {
      table[g] = static_cast<Mask>(rng.next()) & static_cast<Mask>((1u << n) - 1) & ~static_cast<Mask>(g);
    }
    const ExplicitViolatorSpace s(table);
    const auto w = check_axioms(s);
    if (!w) continue;
    ASSERT_EQ(w->axiom, Axiom::locality);
    EXPECT_TRUE(test::subset(w->F, w->G));
    EXPECT_EQ(w->G & s.violators(w->F), 0u);
    EXPECT_NE(s.violators(w->F), s.violators(w->G));
    const auto r = reference::check_axioms(s);
    ASSERT_TRUE(r);
    EXPECT_EQ(r->F, w->F);
    EXPECT_EQ(r->G, w->G);
  }
}

TEST(Bases, CyclicFixture) {
  const auto s = fixtures::cyclic_three();
  EXPECT_EQ(enumerate_bases(s), (std::vector<Mask>{0, m({0}), m({1}), m({2}), m({0, 1, 2})}));
  EXPECT_EQ(combinatorial_dimension(s), 3u);
}

TEST(Bases, SquareFixture) {
  const auto s = fixtures::square();
  const std::vector<Mask> expected = {0,           m({0}),    m({1}),    m({2}),    m({3}),   m({0, 1}),
                                      m({0, 2}),   m({0, 3}), m({1, 2}), m({1, 3}), m({2, 3})};
  EXPECT_EQ(enumerate_bases(s), expected);
  EXPECT_EQ(combinatorial_dimension(s), 2u);
  EXPECT_EQ(basis_of(s, s.full_mask()), m({0, 2}));
  EXPECT_EQ(bases_of(s, s.full_mask()), (std::vector<Mask>{m({0, 2}), m({1, 3})}));
}

TEST(Bases, SingleRemovalTestMatchesDefinition) {
  Rng rng(29);
  for (int trial = 0; trial < 60; ++trial) {
    const auto s = test::random_acyclic_space(1 + rng.below(std::uint64_t{6}), rng);
    auto brute = test::brute_bases(s);
    std::sort(brute.begin(), brute.end(), [](Mask a, Mask b) { return canonical_less(a, b); });
    EXPECT_EQ(enumerate_bases(s), brute);
    EXPECT_EQ(combinatorial_dimension(s), test::brute_dimension(s));
  }
}

TEST(Bases, BasisOfIsCanonicalMinimum) {
  Rng rng(31);
  for (int trial = 0; trial < 60; ++trial) {
    const auto s = test::random_acyclic_space(1 + rng.below(std::uint64_t{6}), rng);
    for (Mask G = 0; G <= s.full_mask(); ++G) {
      auto all = test::brute_bases_of(s, G);
      std::sort(all.begin(), all.end(), [](Mask a, Mask b) { return canonical_less(a, b); });
      EXPECT_EQ(bases_of(s, G), all);
      EXPECT_EQ(basis_of(s, G), all.front());
      EXPECT_EQ(s.violators(basis_of(s, G)), s.violators(G));
    }
  }
}

TEST(Structure, CyclicFixtureHasPublishedCycle) {
  const auto s = fixtures::cyclic_three();
  const auto st = structure(s);
  EXPECT_FALSE(st.acyclic);
  EXPECT_TRUE(st.linear_extension.empty());
  std::vector<Mask> cycle;
  for (auto c : st.cycle) cycle.push_back(st.representative(c));
  EXPECT_EQ(cycle, (std::vector<Mask>{m({0}), m({2}), m({1})}));  // f <=0 h <=0 g <=0 f
  for (std::size_t i = 0; i < st.cycle.size(); ++i) {
    EXPECT_TRUE(st.leq0.test(st.cycle[i], st.cycle[(i + 1) % st.cycle.size()]));
  }
  EXPECT_EQ(st.classes.size(), 5u);  // no two one-element bases are equivalent
}

TEST(Structure, SquareFixture) {
  const auto s = fixtures::square();
  const auto st = structure(s);
  EXPECT_TRUE(st.acyclic);
  ASSERT_EQ(st.classes.size(), 10u);
  int nontrivial = 0;
  for (const auto& cls : st.classes) {
    if (cls.size() > 1) {
      ++nontrivial;
      EXPECT_EQ(cls, (std::vector<Mask>{m({0, 2}), m({1, 3})}));
    }
  }
  EXPECT_EQ(nontrivial, 1);
}

// Independent relation check: C <=0 D iff some member B of C has B disjoint from V(D).
TEST(Structure, RelationsMatchDefinitionsOnRandomSpaces) {
  Rng rng(37);
  for (int trial = 0; trial < 80; ++trial) {
    const bool cyclic_source = trial % 2 == 1;
    ExplicitViolatorSpace s = test::random_acyclic_space(1 + rng.below(std::uint64_t{5}), rng);
    if (cyclic_source) {
      const auto& shapes = test::uso_shapes();
      const auto part = GridPartition::consecutive(shapes[rng.below(shapes.size())]);
      auto u = std::make_shared<const GridUso>(random_uso(part, rng));
      s = reference::tabulate(UsoOracle(u));
    }
    const auto st = structure(s);
    const std::size_t k = st.classes.size();
    for (std::size_t c = 0; c < k; ++c) {
      for (std::size_t d = 0; d < k; ++d) {
        bool leq = false;
        for (Mask B : st.classes[c]) leq = leq || (B & st.class_violators[d]) == 0;
        EXPECT_EQ(st.leq0.test(c, d), leq);
      }
    }
    // Reachability by DFS for the closure; acyclic iff no two distinct classes reach each other.
    bool antisymmetric = true;
    for (std::size_t c = 0; c < k; ++c) {
      std::vector<char> seen(k, 0);
      std::vector<std::size_t> stack{c};
      seen[c] = 1;
      while (!stack.empty()) {
        const auto x = stack.back();
        stack.pop_back();
        for (std::size_t y = 0; y < k; ++y) {
          if (st.leq0.test(x, y) && !seen[y]) {
            seen[y] = 1;
            stack.push_back(y);
          }
        }
      }
      for (std::size_t d = 0; d < k; ++d) {
        EXPECT_EQ(st.leq1.test(c, d), static_cast<bool>(seen[d])) << c << " " << d;
        if (d != c && seen[d] && st.leq1.test(d, c)) antisymmetric = false;
      }
    }
    EXPECT_EQ(st.acyclic, antisymmetric);
    if (st.acyclic) {
      ASSERT_EQ(st.linear_extension.size(), k);
      std::vector<std::size_t> pos(k);
      for (std::size_t i = 0; i < k; ++i) pos[st.linear_extension[i]] = i;
      for (std::size_t c = 0; c < k; ++c) {
        for (std::size_t d = 0; d < k; ++d) {
          if (c != d && st.leq1.test(c, d)) EXPECT_LT(pos[c], pos[d]);
        }
      }
    } else {
      ASSERT_GE(st.cycle.size(), 2u);
      for (std::size_t i = 0; i < st.cycle.size(); ++i) {
        EXPECT_TRUE(st.leq0.test(st.cycle[i], st.cycle[(i + 1) % st.cycle.size()]));
      }
    }
  }
}

// Spaces from concrete LP-type problems are always acyclic.
TEST(Structure, ConcreteSourcesAreAcyclic) {
  Rng rng(41);
  for (int trial = 0; trial < 100; ++trial) {
    const auto s = test::random_acyclic_space(1 + rng.below(std::uint64_t{6}), rng);
    EXPECT_FALSE(check_axioms(s));
    EXPECT_TRUE(structure(s).acyclic);
  }
}

// When [B] <=0 [C] for distinct classes, no members satisfy C' <=0 B'.
TEST(Structure, NoTwoCyclesBetweenClasses) {
  Rng rng(43);
  int cyclic = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const auto s = trial % 2 ? test::random_acyclic_space(1 + rng.below(std::uint64_t{6}), rng)
                             : random_violator_space(4, 3, rng);
    const auto st = structure(s);
    cyclic += !st.acyclic;
    for (std::size_t c = 0; c < st.classes.size(); ++c) {
      for (std::size_t d = 0; d < st.classes.size(); ++d) {
        if (c != d && st.leq0.test(c, d)) EXPECT_FALSE(st.leq0.test(d, c)) << trial;
      }
    }
  }
  EXPECT_GT(cyclic, 0);
}

TEST(RandomViolatorSpace, SatisfiesAxiomsAndDimensionCap) {
  Rng rng(47);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = rng.below(std::uint64_t{7});
    const std::size_t cap = 1 + rng.below(std::uint64_t{3});
    const auto s = random_violator_space(n, cap, rng);
    EXPECT_EQ(s.size(), n);
    EXPECT_TRUE(test::brute_consistent(s) && test::brute_local(s));
    EXPECT_LE(test::brute_dimension(s), cap);
  }
  Rng a(5);
  Rng b(5);
  EXPECT_EQ(random_violator_space(5, 2, a), random_violator_space(5, 2, b));
  EXPECT_THROW(random_violator_space(13, 2, a), SizeGuard);
  EXPECT_THROW(random_violator_space(6, 0, a, 1), GenerationExhausted);
}

TEST(RandomViolatorSpace, ProbeFindsCyclicSpacesOfDimensionThree) {
  Rng rng(53);
  const auto probe = probe_cyclic(4, 3, 2000, rng);
  EXPECT_EQ(probe.samples, 2000u);
  EXPECT_GT(probe.cyclic, 0u);
  ASSERT_TRUE(probe.first_cyclic);
  EXPECT_FALSE(check_axioms(*probe.first_cyclic));
  EXPECT_FALSE(structure(*probe.first_cyclic).acyclic);
  EXPECT_EQ(combinatorial_dimension(*probe.first_cyclic), 3u);
}

TEST(TableOracle, DeltaDefaultsToDimension) {
  auto s = std::make_shared<const ExplicitViolatorSpace>(fixtures::square());
  TableOracle o(s);
  EXPECT_EQ(o.delta(), 2u);
  EXPECT_EQ(TableOracle(s, 5).delta(), 5u);
  EXPECT_TRUE(o.violates(ConstraintSet(4, {0}), 1));
  EXPECT_FALSE(o.violates(ConstraintSet(4, {0, 2}), 1));
  EXPECT_EQ(o.primitive_calls(), 2u);
  auto empty = std::make_shared<const ExplicitViolatorSpace>(std::vector<Mask>{0, 0});
  EXPECT_EQ(TableOracle(empty).delta(), 1u);
}

}  // namespace
}  // namespace vs
