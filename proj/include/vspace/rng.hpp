#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "vspace/constraint_set.hpp"

namespace vs {

__extension__ typedef unsigned __int128 uint128;

/// Seed used by every randomized entry point when none is supplied.
inline constexpr std::uint64_t kDefaultSeed = 20080101;

/// Deterministic generator pinned to std::mt19937_64, whose output sequence is
/// fixed by the standard. Bounded draws use plain rejection sampling rather than
/// std::uniform_int_distribution so results match across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = kDefaultSeed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, bound); bound > 0.
  std::uint64_t below(std::uint64_t bound);
  uint128 below(uint128 bound);

  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Independent stream derived from this generator's seed (not its state).
  Rng split(std::uint64_t stream) const;

  /// Uniform r-element subset of `pool`.
  ConstraintSet sample_subset(const ConstraintSet& pool, std::size_t r);

  template <class T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[below(static_cast<std::uint64_t>(i))]);
    }
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

/// SplitMix64 finalizer, used to derive sub-seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace vs
