#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <vector>

namespace vs {

/// Dense subset mask used by table-backed structures (ground sets of at most 32 elements).
using Mask = std::uint32_t;

/// A subset of the ground set H = {0, ..., n-1}, stored as a word array.
///
/// All binary operations require both operands to live in the same ground set;
/// mixing universes throws ContractViolation.
class ConstraintSet {
 public:
  using Index = std::size_t;

  ConstraintSet() = default;
  explicit ConstraintSet(std::size_t universe);
  ConstraintSet(std::size_t universe, std::initializer_list<Index> members);
  ConstraintSet(std::size_t universe, const std::vector<Index>& members);

  static ConstraintSet full(std::size_t universe);
  static ConstraintSet from_mask(std::size_t universe, std::uint64_t mask);

  std::size_t universe() const { return universe_; }
  std::size_t size() const;
  bool empty() const;

  bool contains(Index h) const;
  void insert(Index h);
  void erase(Index h);
  ConstraintSet with(Index h) const;
  ConstraintSet without(Index h) const;

  ConstraintSet& operator|=(const ConstraintSet& other);
  ConstraintSet& operator&=(const ConstraintSet& other);
  ConstraintSet& operator-=(const ConstraintSet& other);
  ConstraintSet& operator^=(const ConstraintSet& other);

  friend ConstraintSet operator|(ConstraintSet a, const ConstraintSet& b) { return a |= b; }
  friend ConstraintSet operator&(ConstraintSet a, const ConstraintSet& b) { return a &= b; }
  friend ConstraintSet operator-(ConstraintSet a, const ConstraintSet& b) { return a -= b; }
  friend ConstraintSet operator^(ConstraintSet a, const ConstraintSet& b) { return a ^= b; }

  bool is_subset_of(const ConstraintSet& other) const;
  bool intersects(const ConstraintSet& other) const;

  /// Only valid for universes of at most 64 elements.
  std::uint64_t to_mask() const;

  /// Members in increasing order.
  std::vector<Index> members() const;

  template <class Fn>
  void for_each(Fn&& fn) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      std::uint64_t bits = words_[w];
      while (bits != 0) {
        fn(static_cast<Index>(w * 64 + std::countr_zero(bits)));
        bits &= bits - 1;
      }
    }
  }

  friend bool operator==(const ConstraintSet& a, const ConstraintSet& b) = default;

  std::size_t hash() const;

 private:
  void require_same_universe(const ConstraintSet& other) const;
  void require_index(Index h) const;

  std::size_t universe_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Canonical order: ascending cardinality, then lexicographic on sorted members.
bool canonical_less(const ConstraintSet& a, const ConstraintSet& b);
bool canonical_less(Mask a, Mask b);

/// Enumerates the k-element subsets of `pool` in lexicographic order of
/// positions; the callback returns false to stop early. Returns false iff stopped.
bool for_each_combination(const std::vector<ConstraintSet::Index>& pool, std::size_t k,
                          const std::function<bool(const std::vector<ConstraintSet::Index>&)>& fn);

}  // namespace vs

template <>
struct std::hash<vs::ConstraintSet> {
  std::size_t operator()(const vs::ConstraintSet& s) const noexcept { return s.hash(); }
};
