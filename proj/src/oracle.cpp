#include "vspace/oracle.hpp"

#include <string>

#include "vspace/errors.hpp"

namespace vs {

ViolationOracle::ViolationOracle(std::size_t size, std::size_t delta) : size_(size), delta_(delta) {
  if (delta_ == 0) throw ContractViolation("delta must be a positive integer");
}

bool ViolationOracle::violates(const ConstraintSet& G, ConstraintSet::Index h) const {
  check_query(G, h);
  calls_.fetch_add(1, std::memory_order_relaxed);
  return test_violation(G, h);
}

bool ViolationOracle::peek(const ConstraintSet& G, ConstraintSet::Index h) const {
  check_query(G, h);
  return test_violation(G, h);
}

ConstraintSet ViolationOracle::violator_set(const ConstraintSet& G) const {
  ConstraintSet out(size_);
  for (ConstraintSet::Index h = 0; h < size_; ++h) {
    if (!G.contains(h) && test_violation(G, h)) out.insert(h);
  }
  return out;
}

void ViolationOracle::check_query(const ConstraintSet& G, ConstraintSet::Index h) const {
  if (G.universe() != size_) {
    throw ContractViolation("query set lives in a ground set of size " + std::to_string(G.universe()) +
                            ", oracle has " + std::to_string(size_));
  }
  if (h >= size_) throw ContractViolation("constraint index " + std::to_string(h) + " out of range");
  if (G.contains(h)) {
    throw ContractViolation("violation query with h = " + std::to_string(h) + " inside G");
  }
}

DeltaOverride::DeltaOverride(std::shared_ptr<const ViolationOracle> inner, std::size_t delta)
    : ViolationOracle(inner->size(), delta), inner_(std::move(inner)) {}

ConstraintSet DeltaOverride::violator_set(const ConstraintSet& G) const {
  return inner_->violator_set(G);
}

bool DeltaOverride::test_violation(const ConstraintSet& G, ConstraintSet::Index h) const {
  return inner_->peek(G, h);
}

}  // namespace vs
