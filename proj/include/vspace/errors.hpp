#pragma once

#include <stdexcept>
#include <string>

namespace vs {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller broke an operation's precondition (e.g. asked whether h violates G with h in G).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// The trivial algorithm found no basis of size <= delta: the delta hint is
/// too small or the oracle is not a violator space.
class NoBasisFound : public Error {
 public:
  using Error::Error;
};

/// A Clarkson loop ran past its iteration guard or broke one of its hard
/// loop bounds. Only happens for oracles that violate the axioms.
class IterationGuardExceeded : public Error {
 public:
  using Error::Error;
};

class WeightOverflow : public Error {
 public:
  using Error::Error;
};

class GenerationExhausted : public Error {
 public:
  using Error::Error;
};

/// Instance too large for an exhaustive operation.
class SizeGuard : public Error {
 public:
  using Error::Error;
};

/// Structurally invalid instance (bad partition, inconsistent edge, infeasible LP, ...).
class InvalidInstance : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace vs
