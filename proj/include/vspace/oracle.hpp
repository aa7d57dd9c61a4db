#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "vspace/constraint_set.hpp"

namespace vs {

/// Work an instance does below the primitive-call level, e.g. edge
/// evaluations of a grid orientation.
struct InternalCost {
  std::string label;
  std::uint64_t count = 0;
};

/// Violation-test oracle of a violator space (H, V) over H = {0, ..., n-1}.
///
/// `violates(G, h)` answers h in V(G) for h outside G and is the unit of cost
/// of every algorithm here: each query bumps `primitive_calls()` by exactly one.
/// `peek` and `violator_set` answer the same question without being counted;
/// they exist for verification scans and tabulation.
///
/// Implementations must be deterministic and safe to query concurrently.
class ViolationOracle {
 public:
  ViolationOracle(std::size_t size, std::size_t delta);
  virtual ~ViolationOracle() = default;

  ViolationOracle(const ViolationOracle&) = delete;
  ViolationOracle& operator=(const ViolationOracle&) = delete;

  std::size_t size() const { return size_; }
  /// Upper bound on the combinatorial dimension, always >= 1.
  std::size_t delta() const { return delta_; }

  /// Throws ContractViolation if h is in G or outside the ground set.
  bool violates(const ConstraintSet& G, ConstraintSet::Index h) const;

  bool peek(const ConstraintSet& G, ConstraintSet::Index h) const;

  /// V(G), uncounted. The default scans every h outside G.
  virtual ConstraintSet violator_set(const ConstraintSet& G) const;

  std::uint64_t primitive_calls() const { return calls_.load(std::memory_order_relaxed); }

  /// Instance-specific cost counter, if the instance keeps one.
  virtual std::optional<InternalCost> internal_cost() const { return std::nullopt; }

  ConstraintSet ground_set() const { return ConstraintSet::full(size_); }

 protected:
  virtual bool test_violation(const ConstraintSet& G, ConstraintSet::Index h) const = 0;

 private:
  void check_query(const ConstraintSet& G, ConstraintSet::Index h) const;

  std::size_t size_;
  std::size_t delta_;
  mutable std::atomic<std::uint64_t> calls_{0};
};

/// Reuses another oracle's violation test under a different delta hint.
class DeltaOverride final : public ViolationOracle {
 public:
  DeltaOverride(std::shared_ptr<const ViolationOracle> inner, std::size_t delta);

  ConstraintSet violator_set(const ConstraintSet& G) const override;
  std::optional<InternalCost> internal_cost() const override { return inner_->internal_cost(); }

 protected:
  bool test_violation(const ConstraintSet& G, ConstraintSet::Index h) const override;

 private:
  std::shared_ptr<const ViolationOracle> inner_;
};

}  // namespace vs
