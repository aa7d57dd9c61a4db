#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vspace/constraint_set.hpp"
#include "vspace/oracle.hpp"
#include "vspace/rng.hpp"

namespace vs {

/// Violator space given by its full table G -> V(G) over all 2^n subsets.
class ExplicitViolatorSpace {
 public:
  static constexpr std::size_t kMaxSize = 24;

  /// `table[G]` is V(G) for every mask G < 2^n. Names default to a, b, c, ...
  explicit ExplicitViolatorSpace(std::vector<Mask> table, std::vector<std::string> names = {});

  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  std::span<const Mask> table() const { return table_; }

  Mask violators(Mask G) const { return table_[G]; }
  ConstraintSet violators(const ConstraintSet& G) const;

  Mask full_mask() const { return static_cast<Mask>((std::uint64_t{1} << size()) - 1); }

  friend bool operator==(const ExplicitViolatorSpace&, const ExplicitViolatorSpace&) = default;

 private:
  std::vector<Mask> table_;
  std::vector<std::string> names_;
};

std::vector<std::string> default_names(std::size_t n);

enum class Axiom { consistency, locality };

struct AxiomWitness {
  Axiom axiom;
  Mask F;  // equals G for consistency failures
  Mask G;
};

/// Consistency over all G, then locality over all pairs F subset G with
/// G & V(F) empty. Returns the canonical (smallest G, then first F in
/// descending submask order) witness, or nullopt if both axioms hold.
/// OpenMP-parallel over G; `reference::check_axioms` is the serial twin.
std::optional<AxiomWitness> check_axioms(const ExplicitViolatorSpace& space);

/// Basis predicate: B & V(F) nonempty for every proper subset F of B.
/// For a space satisfying the axioms it suffices to test the sets B \ {h}.
bool is_basis(const ExplicitViolatorSpace& space, Mask B);

/// All bases in canonical order (cardinality, then lexicographic).
std::vector<Mask> enumerate_bases(const ExplicitViolatorSpace& space);

/// The minimum-cardinality, lexicographically smallest B subset of G with V(B) = V(G).
Mask basis_of(const ExplicitViolatorSpace& space, Mask G);

/// Every inclusion-minimal B subset of G with V(B) = V(G), canonical order.
std::vector<Mask> bases_of(const ExplicitViolatorSpace& space, Mask G);

std::size_t combinatorial_dimension(const ExplicitViolatorSpace& space);

/// Square boolean relation on basis classes, one bit row per class.
class Relation {
 public:
  Relation() = default;
  explicit Relation(std::size_t size);

  std::size_t size() const { return size_; }
  bool test(std::size_t i, std::size_t j) const {
    return (rows_[i * stride_ + j / 64] >> (j % 64)) & 1U;
  }
  void set(std::size_t i, std::size_t j) { rows_[i * stride_ + j / 64] |= std::uint64_t{1} << (j % 64); }

  /// Warshall closure in place.
  void close_transitively();

  friend bool operator==(const Relation&, const Relation&) = default;

 private:
  std::size_t size_ = 0;
  std::size_t stride_ = 0;
  std::vector<std::uint64_t> rows_;
};

/// Bases grouped into equivalence classes [B] (same violator set), the
/// locally-smaller relation on classes and its transitive closure.
struct BasisStructure {
  std::vector<Mask> bases;                   // canonical order
  std::vector<std::vector<Mask>> classes;    // each in canonical order; classes ordered by representative
  std::vector<Mask> class_violators;         // V of every member of the class
  Relation leq0;
  Relation leq1;
  bool acyclic = true;
  /// Present iff acyclic: class indices, smallest first.
  std::vector<std::size_t> linear_extension;
  /// Present iff cyclic: c0 <=0 c1 <=0 ... <=0 c0 (c0 not repeated), distinct classes.
  std::vector<std::size_t> cycle;

  Mask representative(std::size_t c) const { return classes[c].front(); }
  std::size_t class_of(Mask basis) const;
};

BasisStructure structure(const ExplicitViolatorSpace& space);

/// Oracle view of a table. delta defaults to max(1, combinatorial dimension).
class TableOracle final : public ViolationOracle {
 public:
  explicit TableOracle(std::shared_ptr<const ExplicitViolatorSpace> space,
                       std::optional<std::size_t> delta = std::nullopt);

  const ExplicitViolatorSpace& space() const { return *space_; }

  ConstraintSet violator_set(const ConstraintSet& G) const override;

 protected:
  bool test_violation(const ConstraintSet& G, ConstraintSet::Index h) const override;

 private:
  std::shared_ptr<const ExplicitViolatorSpace> space_;
};

/// Random violator space on n <= 12 elements whose bases have at most
/// `max_dimension` elements. Values are assigned in order of set size: V(G)
/// is forced whenever some proper subset F has V(F) disjoint from G, and is a
/// uniform subset of H - G otherwise. Attempts with conflicting forced values or
/// a too large basis are restarted. Not uniform over violator spaces.
/// Throws GenerationExhausted after `max_attempts` restarts.
ExplicitViolatorSpace random_violator_space(std::size_t n, std::size_t max_dimension, Rng& rng,
                                            std::uint64_t max_attempts = 1'000'000);

/// Outcome of a random search for cyclic violator spaces of small dimension.
struct CyclicProbe {
  std::uint64_t samples = 0;
  std::uint64_t cyclic = 0;
  std::optional<ExplicitViolatorSpace> first_cyclic;
};

CyclicProbe probe_cyclic(std::size_t n, std::size_t max_dimension, std::uint64_t samples, Rng& rng);

/// Tiny fixtures from the literature, also shipped as JSON files.
namespace fixtures {
/// Three halfplanes f, g, h with {f} <=0 {h} <=0 {g} <=0 {f}.
ExplicitViolatorSpace cyclic_three();
/// Smallest enclosing circle of the unit-square corners a, b, c, d.
ExplicitViolatorSpace square();
}  // namespace fixtures

}  // namespace vs
