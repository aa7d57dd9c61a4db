#include "vspace/algorithms.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "vspace/errors.hpp"

namespace vs {

void SolveStats::absorb(const SolveStats& inner) {
  primitive_calls += inner.primitive_calls;
  basis2_calls += inner.basis2_calls;
  trivial_calls += inner.trivial_calls;
  loop_iterations += inner.loop_iterations;
  max_w_augmentations = std::max(max_w_augmentations, inner.max_w_augmentations);
  max_successful_reweightings = std::max(max_successful_reweightings, inner.max_successful_reweightings);
  reweight_bound_slack = std::min(reweight_bound_slack, inner.reweight_bound_slack);
}

WeightedGroundSet::WeightedGroundSet(const ConstraintSet& G)
    : universe_(G.universe()),
      members_(G.members()),
      position_(G.universe(), static_cast<std::size_t>(-1)),
      weights_(members_.size(), 1),
      total_(members_.size()) {
  for (std::size_t i = 0; i < members_.size(); ++i) position_[members_[i]] = i;
}

uint128 WeightedGroundSet::weight_of(const ConstraintSet& subset) const {
  uint128 sum = 0;
  subset.for_each([&](ConstraintSet::Index h) {
    const std::size_t pos = position_.at(h);
    if (pos == static_cast<std::size_t>(-1)) throw ContractViolation("weight of a constraint outside G");
    sum += weights_[pos];
  });
  return sum;
}

void WeightedGroundSet::double_weights(const ConstraintSet& subset) {
  constexpr uint128 kMax = ~uint128{0};
  subset.for_each([&](ConstraintSet::Index h) {
    const std::size_t pos = position_.at(h);
    if (pos == static_cast<std::size_t>(-1)) throw ContractViolation("reweighting a constraint outside G");
    const uint128 w = weights_[pos];
    if (w > kMax / 2 || total_ > kMax - w) throw WeightOverflow("multiplicities exceed 128 bits");
    weights_[pos] = 2 * w;
    total_ += w;
  });
}

ConstraintSet WeightedGroundSet::sample_support(std::size_t r, Rng& rng) const {
  if (static_cast<uint128>(r) > total_) throw ContractViolation("sample larger than the multiset");
  std::vector<uint128> remaining = weights_;
  uint128 left = total_;
  ConstraintSet support(universe_);
  for (std::size_t draw = 0; draw < r; ++draw) {
    uint128 x = rng.below(left);
    std::size_t pos = 0;
    while (x >= remaining[pos]) {
      x -= remaining[pos];
      ++pos;
    }
    support.insert(members_[pos]);
    --remaining[pos];
    --left;
  }
  return support;
}

std::uint64_t iteration_guard(std::size_t delta, std::size_t set_size) {
  const double log_term = std::log2(static_cast<double>(std::max<std::size_t>(set_size, 1)));
  return static_cast<std::uint64_t>(std::ceil(100.0 * static_cast<double>(delta) * (1.0 + log_term)));
}

namespace {

class CountingTester {
 public:
  CountingTester(const ViolationOracle& oracle, SolveStats& stats) : oracle_(oracle), stats_(stats) {}

  bool operator()(const ConstraintSet& G, ConstraintSet::Index h) const {
    ++stats_.primitive_calls;
    return oracle_.violates(G, h);
  }

  /// {h in G - C : h in V(C)}
  ConstraintSet violators_in(const ConstraintSet& G, const ConstraintSet& C) const {
    ConstraintSet out(G.universe());
    (G - C).for_each([&](ConstraintSet::Index h) {
      if ((*this)(C, h)) out.insert(h);
    });
    return out;
  }

 private:
  const ViolationOracle& oracle_;
  SolveStats& stats_;
};

std::uint64_t isqrt(std::uint64_t x) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(x)));
  while (r * r > x) --r;
  while ((r + 1) * (r + 1) <= x) ++r;
  return r;
}

ConstraintSet trivial_impl(const ViolationOracle& oracle, const ConstraintSet& G, SolveStats& stats) {
  ++stats.trivial_calls;
  const CountingTester violates(oracle, stats);
  const auto pool = G.members();
  const std::size_t max_size = std::min(oracle.delta(), pool.size());
  std::optional<ConstraintSet> found;
  for (std::size_t k = 0; k <= max_size && !found; ++k) {
    for_each_combination(pool, k, [&](const std::vector<ConstraintSet::Index>& chosen) {
      const ConstraintSet B(G.universe(), chosen);
      for (auto h : chosen) {
        if (!violates(B.without(h), h)) return true;
      }
      bool clean = true;
      (G - B).for_each([&](ConstraintSet::Index h) {
        if (clean && violates(B, h)) clean = false;
      });
      if (!clean) return true;
      found = B;
      return false;
    });
  }
  if (!found) {
    throw NoBasisFound("no subset of size <= " + std::to_string(oracle.delta()) +
                       " is a basis; delta too small or oracle is not a violator space");
  }
  return *found;
}

ConstraintSet basis2_impl(const ViolationOracle& oracle, const ConstraintSet& G, Rng& rng,
                          SolveStats& stats) {
  ++stats.basis2_calls;
  const std::size_t delta = oracle.delta();
  const std::size_t size = G.size();
  if (size <= 6 * delta * delta) return trivial_impl(oracle, G, stats);

  const std::size_t r = 6 * delta * delta;
  const double reweight_bound = 3.0 * static_cast<double>(delta) * std::log(static_cast<double>(size));
  const std::uint64_t guard = iteration_guard(delta, size);
  const CountingTester violates(oracle, stats);

  WeightedGroundSet mu(G);
  std::uint64_t successes = 0;
  std::uint64_t iterations = 0;
  ConstraintSet C;
  while (true) {
    if (++iterations > guard) throw IterationGuardExceeded("basis2 exceeded its iteration guard");
    ++stats.loop_iterations;
    const ConstraintSet R = mu.sample_support(r, rng);
    C = trivial_impl(oracle, R, stats);
    const ConstraintSet viol = violates.violators_in(G, C);
    if (viol.empty()) break;
    // mu(V) <= mu(G) / 3 delta, in integers.
    if (mu.weight_of(viol) <= mu.total() / (3 * static_cast<uint128>(delta))) {
      mu.double_weights(viol);
      ++successes;
      if (static_cast<double>(successes) >= reweight_bound) {
        throw IterationGuardExceeded("basis2 reweighted " + std::to_string(successes) +
                                     " times, at or above 3 delta ln|G|");
      }
    }
  }
  stats.max_successful_reweightings = std::max(stats.max_successful_reweightings, successes);
  stats.reweight_bound_slack =
      std::min(stats.reweight_bound_slack, reweight_bound - static_cast<double>(successes));
  return C;
}

ConstraintSet basis1_impl(const ViolationOracle& oracle, const ConstraintSet& G, Rng& rng,
                          SolveStats& stats) {
  const std::size_t delta = oracle.delta();
  const std::size_t size = G.size();
  if (size <= 9 * delta * delta) return basis2_impl(oracle, G, rng, stats);

  const std::size_t r = isqrt(static_cast<std::uint64_t>(delta * delta) * size);
  const std::uint64_t guard = iteration_guard(delta, size);
  const CountingTester violates(oracle, stats);

  ConstraintSet W(G.universe());
  std::uint64_t augmentations = 0;
  std::uint64_t iterations = 0;
  ConstraintSet C;
  while (true) {
    if (++iterations > guard) throw IterationGuardExceeded("basis1 exceeded its iteration guard");
    ++stats.loop_iterations;
    const ConstraintSet R = rng.sample_subset(G, r);
    C = basis2_impl(oracle, W | R, rng, stats);
    const ConstraintSet viol = violates.violators_in(G, C);
    if (viol.empty()) break;
    // |V| <= 2 sqrt|G|  <=>  |V|^2 <= 4 |G|
    const std::uint64_t count = viol.size();
    if (count * count <= 4 * static_cast<std::uint64_t>(size)) {
      W |= viol;
      if (++augmentations > delta) {
        throw IterationGuardExceeded("basis1 augmented W more than delta times");
      }
    }
  }
  stats.max_w_augmentations = std::max(stats.max_w_augmentations, augmentations);
  return C;
}

}  // namespace

ConstraintSet trivial_basis(const ViolationOracle& oracle, const ConstraintSet& G, SolveStats* stats) {
  SolveStats local;
  ConstraintSet B = trivial_impl(oracle, G, stats ? *stats : local);
  return B;
}

BasisResult basis1(const ViolationOracle& oracle, const ConstraintSet& G, Rng& rng) {
  BasisResult out;
  out.stats.rng_seed = rng.seed();
  out.basis = basis1_impl(oracle, G, rng, out.stats);
  return out;
}

BasisResult basis2(const ViolationOracle& oracle, const ConstraintSet& G, Rng& rng) {
  BasisResult out;
  out.stats.rng_seed = rng.seed();
  out.basis = basis2_impl(oracle, G, rng, out.stats);
  return out;
}

BasisResult solve(const ViolationOracle& oracle, Rng& rng) {
  return basis1(oracle, oracle.ground_set(), rng);
}

std::vector<std::uint64_t> sampling_counts(const ViolationOracle& oracle, const ConstraintSet& W,
                                           std::size_t r, std::size_t trials, std::uint64_t seed) {
  const ConstraintSet H = oracle.ground_set();
  if (r >= oracle.size()) throw ContractViolation("sampling requires r < n");
  std::vector<std::uint64_t> counts(trials, 0);
  const Rng master(seed);
  const auto total = static_cast<std::int64_t>(trials);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t t = 0; t < total; ++t) {
    Rng rng = master.split(static_cast<std::uint64_t>(t));
    const ConstraintSet U = W | rng.sample_subset(H, r);
    counts[static_cast<std::size_t>(t)] = (oracle.violator_set(U) - U).size();
  }
  return counts;
}

SamplingReport sampling_check(const ViolationOracle& oracle, const ConstraintSet& W, std::size_t r,
                              std::size_t trials, std::uint64_t seed) {
  if (trials == 0) throw ContractViolation("sampling requires at least one trial");
  const auto counts = sampling_counts(oracle, W, r, trials, seed);

  SamplingReport rep;
  rep.r = r;
  rep.trials = trials;
  rep.seed = seed;
  long double sum = 0;
  for (auto c : counts) sum += static_cast<long double>(c);
  rep.mean = static_cast<double>(sum / static_cast<long double>(trials));
  long double sq = 0;
  for (auto c : counts) {
    const long double d = static_cast<long double>(c) - rep.mean;
    sq += d * d;
  }
  rep.stddev = trials > 1 ? static_cast<double>(std::sqrt(sq / static_cast<long double>(trials - 1))) : 0.0;
  const double n = static_cast<double>(oracle.size());
  rep.bound = static_cast<double>(oracle.delta()) * (n - static_cast<double>(r)) / (static_cast<double>(r) + 1.0);
  rep.pass = rep.mean <= rep.bound + 3.0 * rep.stddev / std::sqrt(static_cast<double>(trials));
  return rep;
}

}  // namespace vs
