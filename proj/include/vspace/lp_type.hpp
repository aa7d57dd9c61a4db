#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "vspace/constraint_set.hpp"
#include "vspace/explicit.hpp"

namespace vs {

/// Abstract LP-type problem (H, w, W, <=) given as a full table.
///
/// Values are ranks into `order` (ascending), so comparing two values is
/// comparing integers; kInfinity sorts above every token.
struct AbstractLpTable {
  using Value = std::int32_t;
  static constexpr Value kInfinity = std::numeric_limits<Value>::max();
  static constexpr const char* kInfinityToken = "+inf";

  std::vector<std::string> names;  // constraints
  std::vector<std::string> order;  // value tokens, smallest first
  std::vector<Value> values;       // w(G) per mask

  std::size_t size() const { return names.size(); }
  Value value(Mask G) const { return values[G]; }
  std::string token(Value v) const { return v == kInfinity ? kInfinityToken : order.at(static_cast<std::size_t>(v)); }

  /// Checks table shape and token ranges; throws InvalidInstance.
  void validate_shape() const;
};

enum class LpAxiom { monotonicity, locality };

struct LpAxiomWitness {
  LpAxiom axiom;
  Mask F;
  Mask G;
  std::optional<std::size_t> h;  // locality only
};

/// Monotonicity (checked along single-element extensions, which is
/// equivalent by transitivity) and locality over every (F, G, h).
std::optional<LpAxiomWitness> check_abstract_axioms(const AbstractLpTable& t);

/// V(G) = { h : w(G + h) > w(G) }. Throws ContractViolation unless `t` passes
/// check_abstract_axioms.
ExplicitViolatorSpace violator_map_of_abstract(const AbstractLpTable& t);

/// Inclusion-minimal B subset of G with w(B) = w(G), canonical order.
std::vector<Mask> bases_of(const AbstractLpTable& t, Mask G);

/// Concrete LP-type problem: a linearly ordered point list and a list of
/// constraints (subsets of points, duplicates allowed; position is identity).
struct ConcreteLpProblem {
  std::vector<std::string> points;                    // in increasing order
  std::vector<std::vector<std::size_t>> constraints;  // sorted point indices
  std::vector<std::string> names;                     // one per constraint

  void validate_shape() const;
};

/// Concretization of an acyclic space: points are the basis classes ordered by
/// the deterministic linear extension, constraint h is S(h) = {[B] : h not in V(B)}.
/// Throws ContractViolation for cyclic spaces.
ConcreteLpProblem to_concrete(const ExplicitViolatorSpace& space);
ConcreteLpProblem to_concrete(const ExplicitViolatorSpace& space, const BasisStructure& s);

/// w(G) = index of the minimum of the intersection of G's constraints
/// (+inf when empty; the minimum of all points for G = {}).
AbstractLpTable concrete_to_abstract(const ConcreteLpProblem& p);

/// Label used for the point representing a basis class, e.g. "{a,c}".
std::string class_label(const ExplicitViolatorSpace& space, const BasisStructure& s, std::size_t c);

}  // namespace vs
