#include "vspace/rng.hpp"

#include "vspace/errors.hpp"

namespace vs {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) throw ContractViolation("Rng::below with empty range");
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  std::uint64_t x;
  do {
    x = next();
  } while (x >= limit);
  return x % bound;
}

uint128 Rng::below(uint128 bound) {
  if (bound == 0) throw ContractViolation("Rng::below with empty range");
  if ((bound >> 64) == 0) return below(static_cast<std::uint64_t>(bound));
  const uint128 max = ~uint128{0};
  const uint128 limit = max - (max % bound);
  uint128 x;
  do {
    x = (static_cast<uint128>(next()) << 64) | next();
  } while (x >= limit);
  return x % bound;
}

Rng Rng::split(std::uint64_t stream) const { return Rng(mix_seed(seed_, stream)); }

ConstraintSet Rng::sample_subset(const ConstraintSet& pool, std::size_t r) {
  auto members = pool.members();
  if (r > members.size()) throw ContractViolation("sample_subset: r exceeds pool size");
  // Partial Fisher-Yates: the first r slots end up uniform over r-subsets.
  for (std::size_t i = 0; i < r; ++i) {
    const std::size_t j = i + below(static_cast<std::uint64_t>(members.size() - i));
    std::swap(members[i], members[j]);
  }
  ConstraintSet out(pool.universe());
  for (std::size_t i = 0; i < r; ++i) out.insert(members[i]);
  return out;
}

}  // namespace vs
