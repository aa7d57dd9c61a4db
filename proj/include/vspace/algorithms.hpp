#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "vspace/constraint_set.hpp"
#include "vspace/oracle.hpp"
#include "vspace/rng.hpp"

namespace vs {

/// Counters accumulated by one solver invocation.
struct SolveStats {
  std::uint64_t primitive_calls = 0;
  std::uint64_t basis2_calls = 0;
  std::uint64_t trivial_calls = 0;
  /// REPEAT-loop passes of basis1 and basis2 combined.
  std::uint64_t loop_iterations = 0;
  std::uint64_t rng_seed = 0;

  /// Largest number of W augmentations in any basis1 loop (bounded by delta).
  std::uint64_t max_w_augmentations = 0;
  /// Largest number of reweighting iterations in any basis2 loop.
  std::uint64_t max_successful_reweightings = 0;
  /// Smallest value of 3 delta ln|G| - (reweighting iterations) over all
  /// basis2 loops; stays positive when the reweighting bound holds.
  double reweight_bound_slack = std::numeric_limits<double>::infinity();

  void absorb(const SolveStats& inner);
};

struct BasisResult {
  ConstraintSet basis;
  SolveStats stats;
};

/// Positive integer multiplicities mu(h) over a fixed set G, kept in 128 bits.
class WeightedGroundSet {
 public:
  explicit WeightedGroundSet(const ConstraintSet& G);

  const std::vector<ConstraintSet::Index>& members() const { return members_; }
  uint128 weight_at(std::size_t pos) const { return weights_[pos]; }
  uint128 weight_of(const ConstraintSet& subset) const;
  uint128 total() const { return total_; }

  /// mu(h) := 2 mu(h) for h in `subset`; throws WeightOverflow past 128 bits.
  void double_weights(const ConstraintSet& subset);

  /// Support of r copies drawn uniformly without replacement from the
  /// multiset with mu(h) copies of h.
  ConstraintSet sample_support(std::size_t r, Rng& rng) const;

 private:
  std::size_t universe_;
  std::vector<ConstraintSet::Index> members_;
  std::vector<std::size_t> position_;  // ground index -> position, or npos
  std::vector<uint128> weights_;
  uint128 total_ = 0;
};

/// Exhaustive search over subsets of G of size <= delta, cardinality then
/// lexicographic order; first B with h in V(B - h) for all h in B and no
/// violator in G - B. Throws NoBasisFound.
ConstraintSet trivial_basis(const ViolationOracle& oracle, const ConstraintSet& G,
                            SolveStats* stats = nullptr);

/// Clarkson's first algorithm (sampling with a growing working set W).
BasisResult basis1(const ViolationOracle& oracle, const ConstraintSet& G, Rng& rng);

/// Clarkson's second algorithm (iterative reweighting).
BasisResult basis2(const ViolationOracle& oracle, const ConstraintSet& G, Rng& rng);

/// basis1 on the whole ground set.
BasisResult solve(const ViolationOracle& oracle, Rng& rng);

/// Iteration guard shared by both loops: 100 delta (1 + log2 |G|).
std::uint64_t iteration_guard(std::size_t delta, std::size_t set_size);

struct SamplingReport {
  std::size_t r = 0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation of the per-trial counts
  double bound = 0.0;   // delta (n - r) / (r + 1)
  bool pass = false;    // mean <= bound + 3 stddev / sqrt(trials)
};

/// Per-trial violator counts |V(W + R) - (W + R)| for uniform r-subsets R of H.
/// Trial t draws from Rng(seed).split(t), so counts do not depend on threading.
std::vector<std::uint64_t> sampling_counts(const ViolationOracle& oracle, const ConstraintSet& W,
                                           std::size_t r, std::size_t trials, std::uint64_t seed);

SamplingReport sampling_check(const ViolationOracle& oracle, const ConstraintSet& W, std::size_t r,
                              std::size_t trials, std::uint64_t seed);

}  // namespace vs
