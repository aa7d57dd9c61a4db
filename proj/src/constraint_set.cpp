#include "vspace/constraint_set.hpp"

#include <algorithm>
#include <string>

#include "vspace/errors.hpp"

namespace vs {

namespace {

std::size_t word_count(std::size_t universe) { return (universe + 63) / 64; }

}  // namespace

ConstraintSet::ConstraintSet(std::size_t universe)
    : universe_(universe), words_(word_count(universe), 0) {}

ConstraintSet::ConstraintSet(std::size_t universe, std::initializer_list<Index> members)
    : ConstraintSet(universe) {
  for (Index h : members) insert(h);
}

ConstraintSet::ConstraintSet(std::size_t universe, const std::vector<Index>& members)
    : ConstraintSet(universe) {
  for (Index h : members) insert(h);
}

ConstraintSet ConstraintSet::full(std::size_t universe) {
  ConstraintSet s(universe);
  for (std::size_t w = 0; w < s.words_.size(); ++w) s.words_[w] = ~std::uint64_t{0};
  if (universe % 64 != 0 && !s.words_.empty()) {
    s.words_.back() = (std::uint64_t{1} << (universe % 64)) - 1;
  }
  return s;
}

ConstraintSet ConstraintSet::from_mask(std::size_t universe, std::uint64_t mask) {
  if (universe > 64) throw ContractViolation("from_mask: universe exceeds 64 elements");
  if (universe < 64 && (mask >> universe) != 0) {
    throw ContractViolation("from_mask: mask has bits outside the universe");
  }
  ConstraintSet s(universe);
  if (!s.words_.empty()) s.words_[0] = mask;
  return s;
}

std::size_t ConstraintSet::size() const {
  std::size_t count = 0;
  for (std::uint64_t w : words_) count += static_cast<std::size_t>(std::popcount(w));
  return count;
}

bool ConstraintSet::empty() const {
  return std::all_of(words_.begin(), words_.end(), [](std::uint64_t w) { return w == 0; });
}

bool ConstraintSet::contains(Index h) const {
  require_index(h);
  return (words_[h / 64] >> (h % 64)) & 1U;
}

void ConstraintSet::insert(Index h) {
  require_index(h);
  words_[h / 64] |= std::uint64_t{1} << (h % 64);
}

void ConstraintSet::erase(Index h) {
  require_index(h);
  words_[h / 64] &= ~(std::uint64_t{1} << (h % 64));
}

ConstraintSet ConstraintSet::with(Index h) const {
  ConstraintSet s = *this;
  s.insert(h);
  return s;
}

ConstraintSet ConstraintSet::without(Index h) const {
  ConstraintSet s = *this;
  s.erase(h);
  return s;
}

ConstraintSet& ConstraintSet::operator|=(const ConstraintSet& other) {
  require_same_universe(other);
  for (std::size_t w = 0; w < words_.size(); ++w) words_[w] |= other.words_[w];
  return *this;
}

ConstraintSet& ConstraintSet::operator&=(const ConstraintSet& other) {
  require_same_universe(other);
  for (std::size_t w = 0; w < words_.size(); ++w) words_[w] &= other.words_[w];
  return *this;
}

ConstraintSet& ConstraintSet::operator-=(const ConstraintSet& other) {
  require_same_universe(other);
  for (std::size_t w = 0; w < words_.size(); ++w) words_[w] &= ~other.words_[w];
  return *this;
}

ConstraintSet& ConstraintSet::operator^=(const ConstraintSet& other) {
  require_same_universe(other);
  for (std::size_t w = 0; w < words_.size(); ++w) words_[w] ^= other.words_[w];
  return *this;
}

bool ConstraintSet::is_subset_of(const ConstraintSet& other) const {
  require_same_universe(other);
  for (std::size_t w = 0; w < words_.size(); ++w) {
    if ((words_[w] & ~other.words_[w]) != 0) return false;
  }
  return true;
}

bool ConstraintSet::intersects(const ConstraintSet& other) const {
  require_same_universe(other);
  for (std::size_t w = 0; w < words_.size(); ++w) {
    if ((words_[w] & other.words_[w]) != 0) return true;
  }
  return false;
}

std::uint64_t ConstraintSet::to_mask() const {
  if (universe_ > 64) throw ContractViolation("to_mask: universe exceeds 64 elements");
  return words_.empty() ? 0 : words_[0];
}

std::vector<ConstraintSet::Index> ConstraintSet::members() const {
  std::vector<Index> out;
  out.reserve(size());
  for_each([&](Index h) { out.push_back(h); });
  return out;
}

std::size_t ConstraintSet::hash() const {
  std::size_t seed = std::hash<std::size_t>{}(universe_);
  for (std::uint64_t w : words_) {
    seed ^= std::hash<std::uint64_t>{}(w) + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
  }
  return seed;
}

void ConstraintSet::require_same_universe(const ConstraintSet& other) const {
  if (universe_ != other.universe_) {
    throw ContractViolation("constraint sets over different ground sets (" +
                            std::to_string(universe_) + " vs " + std::to_string(other.universe_) +
                            ")");
  }
}

void ConstraintSet::require_index(Index h) const {
  if (h >= universe_) {
    throw ContractViolation("constraint index " + std::to_string(h) + " outside ground set of size " +
                            std::to_string(universe_));
  }
}

bool canonical_less(const ConstraintSet& a, const ConstraintSet& b) {
  const std::size_t sa = a.size();
  const std::size_t sb = b.size();
  if (sa != sb) return sa < sb;
  const auto ma = a.members();
  const auto mb = b.members();
  return std::lexicographical_compare(ma.begin(), ma.end(), mb.begin(), mb.end());
}

bool canonical_less(Mask a, Mask b) {
  const int sa = std::popcount(a);
  const int sb = std::popcount(b);
  if (sa != sb) return sa < sb;
  // Same cardinality: the set whose lowest differing element is smaller comes first.
  const Mask diff = a ^ b;
  if (diff == 0) return false;
  const Mask lowest = diff & (~diff + 1);
  return (a & lowest) != 0;
}

bool for_each_combination(const std::vector<ConstraintSet::Index>& pool, std::size_t k,
                          const std::function<bool(const std::vector<ConstraintSet::Index>&)>& fn) {
  const std::size_t n = pool.size();
  if (k > n) return true;
  std::vector<std::size_t> pos(k);
  for (std::size_t i = 0; i < k; ++i) pos[i] = i;
  std::vector<ConstraintSet::Index> chosen(k);
  while (true) {
    for (std::size_t i = 0; i < k; ++i) chosen[i] = pool[pos[i]];
    if (!fn(chosen)) return false;
    // Advance to the next combination in lexicographic order.
    std::size_t i = k;
    while (i > 0 && pos[i - 1] == n - k + (i - 1)) --i;
    if (i == 0) return true;
    ++pos[i - 1];
    for (std::size_t j = i; j < k; ++j) pos[j] = pos[j - 1] + 1;
  }
}

}  // namespace vs
