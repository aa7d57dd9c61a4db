#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vspace/explicit.hpp"
#include "vspace/grid_uso.hpp"
#include "vspace/lp_type.hpp"
#include "vspace/oracle.hpp"

/// Single-threaded versions of the OpenMP kernels. They return exactly what
/// the parallel versions return and are kept for tests and benchmarks.
namespace vs::reference {

std::optional<AxiomWitness> check_axioms(const ExplicitViolatorSpace& space);
std::optional<LpAxiomWitness> check_abstract_axioms(const AbstractLpTable& t);
ExplicitViolatorSpace tabulate(const ViolationOracle& oracle, std::vector<std::string> names = {});
std::optional<SubgridWitness> validate_uso(const GridUso& u);
std::vector<std::uint64_t> sampling_counts(const ViolationOracle& oracle, const ConstraintSet& W,
                                           std::size_t r, std::size_t trials, std::uint64_t seed);

}  // namespace vs::reference
