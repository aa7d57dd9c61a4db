#include "vspace/reference.hpp"

#include "vspace/errors.hpp"
#include "vspace/instances.hpp"
#include "vspace/rng.hpp"

namespace vs::reference {

std::optional<AxiomWitness> check_axioms(const ExplicitViolatorSpace& space) {
  const std::size_t count = space.table().size();
  for (std::size_t g = 0; g < count; ++g) {
    const auto G = static_cast<Mask>(g);
    if ((G & space.violators(G)) != 0) return AxiomWitness{Axiom::consistency, G, G};
  }
  for (std::size_t g = 1; g < count; ++g) {
    const auto G = static_cast<Mask>(g);
    // Proper submasks of G, largest first.
    for (Mask F = (G - 1) & G;; F = (F - 1) & G) {
      const Mask vf = space.violators(F);
      if ((G & vf) == 0 && vf != space.violators(G)) return AxiomWitness{Axiom::locality, F, G};
      if (F == 0) break;
    }
  }
  return std::nullopt;
}

std::optional<LpAxiomWitness> check_abstract_axioms(const AbstractLpTable& t) {
  t.validate_shape();
  const std::size_t n = t.size();
  const std::size_t count = t.values.size();
  for (std::size_t g = 0; g < count; ++g) {
    const auto G = static_cast<Mask>(g);
    for (std::size_t h = 0; h < n; ++h) {
      const Mask bit = Mask{1} << h;
      if ((G & bit) == 0 && t.value(G | bit) < t.value(G)) {
        return LpAxiomWitness{LpAxiom::monotonicity, G, G | bit, std::nullopt};
      }
    }
  }
  for (std::size_t g = 1; g < count; ++g) {
    const auto G = static_cast<Mask>(g);
    for (Mask F = (G - 1) & G;; F = (F - 1) & G) {
      if (t.value(F) == t.value(G)) {
        for (std::size_t h = 0; h < n; ++h) {
          const Mask bit = Mask{1} << h;
          if ((G & bit) != 0) continue;
          if (t.value(G) < t.value(G | bit) && !(t.value(F) < t.value(F | bit))) {
            return LpAxiomWitness{LpAxiom::locality, F, G, h};
          }
        }
      }
      if (F == 0) break;
    }
  }
  return std::nullopt;
}

ExplicitViolatorSpace tabulate(const ViolationOracle& oracle, std::vector<std::string> names) {
  const std::size_t n = oracle.size();
  if (n > kMaxTabulateSize) throw SizeGuard("tabulation is limited to 16 constraints");
  std::vector<Mask> table(std::size_t{1} << n);
  for (std::size_t g = 0; g < table.size(); ++g) {
    table[g] = static_cast<Mask>(oracle.violator_set(ConstraintSet::from_mask(n, g)).to_mask());
  }
  return ExplicitViolatorSpace(std::move(table), std::move(names));
}

std::optional<SubgridWitness> validate_uso(const GridUso& u) {
  const std::size_t n = u.size();
  if (n > kMaxValidateSize) throw SizeGuard("grid larger than 16 elements");
  const std::uint64_t vertices = u.partition().vertex_count();
  for (std::uint64_t g = 1; g < (std::uint64_t{1} << n); ++g) {
    const auto G = ConstraintSet::from_mask(n, g);
    if (!u.partition().is_valid(G)) continue;
    std::size_t sinks = 0;
    for (std::uint64_t id = 0; id < vertices; ++id) {
      const Vertex J = u.vertex_at(id);
      if (J.as_set(n).is_subset_of(G) && !u.outmap(J).intersects(G)) ++sinks;
    }
    if (sinks != 1) return SubgridWitness{G, sinks};
  }
  return std::nullopt;
}

std::vector<std::uint64_t> sampling_counts(const ViolationOracle& oracle, const ConstraintSet& W,
                                           std::size_t r, std::size_t trials, std::uint64_t seed) {
  if (r >= oracle.size()) throw ContractViolation("sampling requires r < n");
  const ConstraintSet H = oracle.ground_set();
  const Rng master(seed);
  std::vector<std::uint64_t> counts;
  counts.reserve(trials);
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng = master.split(t);
    const ConstraintSet U = W | rng.sample_subset(H, r);
    counts.push_back((oracle.violator_set(U) - U).size());
  }
  return counts;
}

}  // namespace vs::reference
