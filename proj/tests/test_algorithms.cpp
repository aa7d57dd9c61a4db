#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "support.hpp"
#include "vspace/algorithms.hpp"
#include "vspace/errors.hpp"
#include "vspace/reference.hpp"

namespace vs {
namespace {

std::shared_ptr<const ExplicitViolatorSpace> shared(ExplicitViolatorSpace s) {
  return std::make_shared<const ExplicitViolatorSpace>(std::move(s));
}

/// Violators of B inside G, by uncounted scan.
ConstraintSet violators_in(const ViolationOracle& o, const ConstraintSet& B, const ConstraintSet& G) {
  ConstraintSet out(G.universe());
  for (auto h : (G - B).members()) {
    if (o.peek(B, h)) out.insert(h);
  }
  return out;
}

/// Random feasible two-variable LP: every halfplane keeps the point (3, 3).
HalfplaneLp random_lp(std::size_t n, Rng& rng) {
  HalfplaneLp lp;
  for (std::size_t h = 0; h < n; ++h) {
    Rational a(static_cast<long>(rng.below(std::uint64_t{21})) - 10);
    Rational b(static_cast<long>(rng.below(std::uint64_t{21})) - 10);
    Rational c = 3 * a + 3 * b + static_cast<long>(rng.below(std::uint64_t{5}));
    lp.halfplanes.push_back({a, b, c});
    lp.names.push_back("h" + std::to_string(h));
  }
  return lp;
}

TEST(Trivial, Fixtures) {
  const TableOracle cyc(shared(fixtures::cyclic_three()));
  EXPECT_EQ(trivial_basis(cyc, ConstraintSet::full(3)), ConstraintSet::full(3));
  EXPECT_EQ(trivial_basis(cyc, ConstraintSet(3)), ConstraintSet(3));
  const TableOracle sq(shared(fixtures::square()));
  EXPECT_EQ(trivial_basis(sq, ConstraintSet::full(4)), ConstraintSet(4, {0, 2}));
  const TableOracle one(shared(ExplicitViolatorSpace({1, 0})));
  Rng rng(1);
  EXPECT_EQ(solve(one, rng).basis, ConstraintSet(1, {0}));
}

TEST(Trivial, DeltaTooSmall) {
  const TableOracle sq(shared(fixtures::square()), 1);
  EXPECT_THROW(trivial_basis(sq, ConstraintSet::full(4)), NoBasisFound);
}

TEST(Trivial, CanonicalBasisAndCallBound) {
  Rng rng(139);
  for (int trial = 0; trial < 60; ++trial) {
    const auto s = shared(test::random_acyclic_space(1 + rng.below(std::uint64_t{7}), rng));
    const TableOracle o(s);
    const std::size_t n = s->size();
    const std::size_t d = o.delta();
    std::uint64_t bound_terms = 0;
    for (std::size_t i = 0, c = 1; i <= d && i <= n; ++i) {
      bound_terms += c;
      c = c * (n - i) / (i + 1);
    }
    for (Mask G = 0; G <= s->full_mask(); ++G) {
      SolveStats stats;
      const auto B = trivial_basis(o, ConstraintSet::from_mask(n, G), &stats);
      EXPECT_EQ(B.to_mask(), basis_of(*s, G));
      EXPECT_LE(stats.primitive_calls, n * bound_terms);
    }
  }
}

// Both algorithms return a basis of G with no violators in G, on acyclic and
// cyclic tables alike, for 100 seeds.
TEST(Clarkson, SmallTablesAllSeeds) {
  Rng gen(149);
  std::vector<std::shared_ptr<const ExplicitViolatorSpace>> spaces = {shared(fixtures::cyclic_three()),
                                                                      shared(fixtures::square())};
  for (int i = 0; i < 4; ++i) spaces.push_back(shared(test::random_acyclic_space(8, gen)));
  spaces.push_back(shared(tabulate(UsoOracle(std::make_shared<const GridUso>(cyclic_cube_uso())))));
  for (const auto& s : spaces) {
    const TableOracle o(s);
    const auto G = ConstraintSet::full(s->size());
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      Rng r1(seed);
      Rng r2(seed);
      const auto b1 = basis1(o, G, r1).basis;
      const auto b2 = basis2(o, G, r2).basis;
      EXPECT_EQ(s->violators(b1.to_mask()), s->violators(s->full_mask()));
      EXPECT_EQ(s->violators(b2.to_mask()), s->violators(s->full_mask()));
      EXPECT_TRUE(test::brute_is_basis(*s, b1.to_mask()));
      EXPECT_TRUE(test::brute_is_basis(*s, b2.to_mask()));
    }
  }
}

TEST(Clarkson, SmallSetsDelegate) {
  const TableOracle sq(shared(fixtures::square()));
  const auto G = ConstraintSet::full(4);
  Rng a(3);
  Rng b(3);
  const auto r1 = basis1(sq, G, a);
  const auto r2 = basis2(sq, G, b);
  EXPECT_EQ(r1.basis, trivial_basis(sq, G));
  EXPECT_EQ(r2.basis, trivial_basis(sq, G));
  EXPECT_EQ(r1.stats.loop_iterations, 0u);
  EXPECT_EQ(r2.stats.loop_iterations, 0u);
  EXPECT_EQ(r1.stats.trivial_calls, 1u);
}

TEST(Clarkson, GridUsoOfSize200) {
  Rng rng(42);
  const auto p = GridPartition::consecutive({100, 100});
  const auto u = std::make_shared<const GridUso>(random_coordinate_order_uso(p, rng));
  const UsoOracle o(u);
  const auto G = ConstraintSet::full(200);
  Rng solver(42);
  const auto res = basis1(o, G, solver);
  EXPECT_TRUE(violators_in(o, res.basis, G).empty());
  EXPECT_EQ(res.basis, u->global_sink().as_set(200));
  EXPECT_GT(res.stats.loop_iterations, 0u);
  EXPECT_LE(res.stats.max_w_augmentations, 2u);
}

TEST(Clarkson, LpWithSixtyHalfplanes) {
  Rng rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const auto lp = random_lp(60, rng);
    const Lp2dOracle o(lp);
    const auto G = ConstraintSet::full(60);
    Rng solver(7 + static_cast<std::uint64_t>(trial));
    const auto res = basis2(o, G, solver);
    EXPECT_GT(res.stats.loop_iterations, 0u);
    EXPECT_TRUE(violators_in(o, res.basis, G).empty());
    EXPECT_EQ(o.optimum(res.basis), o.optimum(trivial_basis(o, G)));
    EXPECT_EQ(o.optimum(res.basis), o.optimum(G));
  }
}

TEST(Clarkson, ReweightingBoundOnHundredElements) {
  const double bound = 3 * 2 * std::log(100.0);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    const auto lp = random_lp(100, rng);
    const Lp2dOracle o(lp);
    const auto res = basis2(o, ConstraintSet::full(100), rng);
    EXPECT_LT(static_cast<double>(res.stats.max_successful_reweightings), bound);
    EXPECT_GT(res.stats.reweight_bound_slack, 0.0);
    EXPECT_TRUE(violators_in(o, res.basis, ConstraintSet::full(100)).empty());
  }
}

TEST(Clarkson, LargeLpThroughBothLevels) {
  Rng rng(151);
  const auto lp = random_lp(2000, rng);
  const Lp2dOracle o(lp);
  const auto G = ConstraintSet::full(2000);
  const auto res = solve(o, rng);
  EXPECT_TRUE(violators_in(o, res.basis, G).empty());
  EXPECT_EQ(o.optimum(res.basis), o.optimum(G));
  EXPECT_GT(res.stats.basis2_calls, 0u);
  EXPECT_LE(res.stats.max_w_augmentations, 2u);
}

TEST(Clarkson, SeedDeterminism) {
  Rng gen(157);
  const auto lp = random_lp(500, gen);
  const Lp2dOracle o1(lp);
  const Lp2dOracle o2(lp);
  Rng a(99);
  Rng b(99);
  const auto r1 = solve(o1, a);
  const auto r2 = solve(o2, b);
  EXPECT_EQ(r1.basis, r2.basis);
  EXPECT_EQ(r1.stats.primitive_calls, r2.stats.primitive_calls);
  EXPECT_EQ(r1.stats.loop_iterations, r2.stats.loop_iterations);
  EXPECT_EQ(r1.stats.basis2_calls, r2.stats.basis2_calls);
  EXPECT_EQ(r1.stats.primitive_calls, o1.primitive_calls());
}

// An oracle that violates everything is not a violator space; the loops must stop.
class AlwaysViolated final : public ViolationOracle {
 public:
  AlwaysViolated() : ViolationOracle(400, 1) {}

 protected:
  bool test_violation(const ConstraintSet&, ConstraintSet::Index) const override { return true; }
};

TEST(Clarkson, BrokenOracleStops) {
  const AlwaysViolated o;
  Rng rng(1);
  EXPECT_THROW(solve(o, rng), Error);
  EXPECT_EQ(iteration_guard(2, 1024), 2200u);
  EXPECT_EQ(iteration_guard(1, 1), 100u);
}

TEST(WeightedGroundSet, WeightsAndOverflow) {
  const ConstraintSet G(10, {1, 4, 7});
  WeightedGroundSet mu(G);
  EXPECT_EQ(mu.total(), 3u);
  mu.double_weights(ConstraintSet(10, {4}));
  mu.double_weights(ConstraintSet(10, {4, 7}));
  EXPECT_EQ(mu.weight_at(0), 1u);
  EXPECT_EQ(mu.weight_at(1), 4u);
  EXPECT_EQ(mu.weight_of(ConstraintSet(10, {1, 7})), 3u);
  EXPECT_EQ(mu.total(), 7u);
  for (int i = 0; i < 125; ++i) mu.double_weights(ConstraintSet(10, {4}));
  EXPECT_EQ(mu.weight_at(1), uint128{1} << 127);
  EXPECT_THROW(mu.double_weights(ConstraintSet(10, {4})), WeightOverflow);
}

TEST(WeightedGroundSet, SamplesCopiesUniformly) {
  // Weights 1 and 3: one drawn copy is h0 with probability 1/4.
  WeightedGroundSet mu(ConstraintSet(2, {0, 1}));
  mu.double_weights(ConstraintSet(2, {1}));
  mu.double_weights(ConstraintSet(2, {1}));  // weights 1, 4
  Rng rng(163);
  int h0 = 0;
  const int trials = 50000;
  for (int i = 0; i < trials; ++i) {
    const auto s = mu.sample_support(1, rng);
    ASSERT_EQ(s.size(), 1u);
    h0 += s.contains(0);
  }
  EXPECT_NEAR(h0 / static_cast<double>(trials), 0.2, 0.01);
  // Two copies of {1 x h0, 4 x h1} without replacement: support {h1} with probability 6/10.
  int only_h1 = 0;
  for (int i = 0; i < trials; ++i) only_h1 += mu.sample_support(2, rng) == ConstraintSet(2, {1});
  EXPECT_NEAR(only_h1 / static_cast<double>(trials), 0.6, 0.01);
  EXPECT_EQ(mu.sample_support(5, rng), ConstraintSet(2, {0, 1}));
}

double exact_expected_violators(const ExplicitViolatorSpace& s, std::size_t r) {
  double sum = 0;
  std::size_t count = 0;
  for (Mask R = 0; R <= s.full_mask(); ++R) {
    if (static_cast<std::size_t>(std::popcount(R)) != r) continue;
    sum += std::popcount(s.violators(R));
    ++count;
  }
  return sum / static_cast<double>(count);
}

TEST(Sampling, SquareMeetsTheBoundWithEquality) {
  const auto s = shared(fixtures::square());
  EXPECT_DOUBLE_EQ(exact_expected_violators(*s, 2), 4.0 / 3.0);
  const TableOracle o(s);
  const auto rep = sampling_check(o, ConstraintSet(4), 2, 10000, 5);
  EXPECT_DOUBLE_EQ(rep.bound, 4.0 / 3.0);
  EXPECT_NEAR(rep.mean, 4.0 / 3.0, 0.05);
  EXPECT_TRUE(rep.pass);
  EXPECT_EQ(o.primitive_calls(), 0u);
}

TEST(Sampling, MonteCarloMatchesExactExpectation) {
  Rng rng(167);
  for (int trial = 0; trial < 10; ++trial) {
    const auto s = shared(test::random_acyclic_space(7, rng));
    const TableOracle o(s);
    for (std::size_t r = 0; r < 7; ++r) {
      const auto rep = sampling_check(o, ConstraintSet(7), r, 4000, 11 + r);
      const double exact = exact_expected_violators(*s, r);
      EXPECT_NEAR(rep.mean, exact, 4 * rep.stddev / std::sqrt(4000.0) + 1e-9);
      EXPECT_LE(exact, static_cast<double>(o.delta()) * (7.0 - r) / (r + 1.0) + 1e-9);
    }
  }
}

TEST(Sampling, LastElementAndGridUso) {
  const TableOracle sq(shared(fixtures::square()));
  const auto last = sampling_check(sq, ConstraintSet(4), 3, 2000, 1);
  EXPECT_DOUBLE_EQ(last.bound, 2.0 / 4.0);
  EXPECT_TRUE(last.pass);

  Rng rng(173);
  const auto u = std::make_shared<const GridUso>(
      inflate_uso(std::make_shared<const GridUso>(cyclic_cube_uso()), GridPartition::consecutive({10, 10, 10}), rng));
  const UsoOracle o(u);
  const auto rep = sampling_check(o, ConstraintSet(30), 10, 10000, 3);
  EXPECT_DOUBLE_EQ(rep.bound, 3.0 * 20.0 / 11.0);
  EXPECT_TRUE(rep.pass);
}

TEST(Sampling, ParallelCountsMatchSerial) {
  Rng rng(179);
  const auto u = std::make_shared<const GridUso>(random_uso(GridPartition::consecutive({3, 2, 2}), rng));
  const UsoOracle o(u);
  const ConstraintSet W(7, {0});
  EXPECT_EQ(sampling_counts(o, W, 3, 3000, 21), reference::sampling_counts(o, W, 3, 3000, 21));
  EXPECT_EQ(sampling_counts(o, W, 3, 3000, 21), sampling_counts(o, W, 3, 3000, 21));
  EXPECT_NE(sampling_counts(o, W, 3, 3000, 21), sampling_counts(o, W, 3, 3000, 22));
}

}  // namespace
}  // namespace vs
