#include "vspace/lp_type.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <string>

#include "vspace/errors.hpp"

namespace vs {

void AbstractLpTable::validate_shape() const {
  if (names.size() > ExplicitViolatorSpace::kMaxSize) {
    throw SizeGuard("abstract tables are limited to 24 constraints");
  }
  if (values.size() != (std::size_t{1} << names.size())) {
    throw InvalidInstance("abstract table must have 2^n values");
  }
  for (Value v : values) {
    if (v != kInfinity && (v < 0 || static_cast<std::size_t>(v) >= order.size())) {
      throw InvalidInstance("value token outside the supplied order");
    }
  }
}

namespace {

// Locality of w restricted to a fixed G: F ranges over the proper subsets of G.
std::optional<LpAxiomWitness> locality_failure_at(const AbstractLpTable& t, Mask G) {
  const auto wg = t.value(G);
  std::vector<std::size_t> raising;
  for (std::size_t h = 0; h < t.size(); ++h) {
    const Mask bit = Mask{1} << h;
    if ((G & bit) == 0 && wg < t.value(G | bit)) raising.push_back(h);
  }
  if (raising.empty()) return std::nullopt;
  Mask F = G;
  while (true) {
    F = (F - 1) & G;
    if (t.value(F) == wg) {
      for (std::size_t h : raising) {
        const Mask bit = Mask{1} << h;
        if (!(t.value(F) < t.value(F | bit))) return LpAxiomWitness{LpAxiom::locality, F, G, h};
      }
    }
    if (F == 0) break;
  }
  return std::nullopt;
}

}  // namespace

std::optional<LpAxiomWitness> check_abstract_axioms(const AbstractLpTable& t) {
  t.validate_shape();
  const std::size_t n = t.size();
  const Mask full = static_cast<Mask>((std::uint64_t{1} << n) - 1);
  for (Mask G = 0;; ++G) {
    for (std::size_t h = 0; h < n; ++h) {
      const Mask bit = Mask{1} << h;
      if ((G & bit) == 0 && t.value(G | bit) < t.value(G)) {
        return LpAxiomWitness{LpAxiom::monotonicity, G, G | bit, std::nullopt};
      }
    }
    if (G == full) break;
  }

  const std::int64_t count = static_cast<std::int64_t>(t.values.size());
  constexpr std::int64_t kNone = std::numeric_limits<std::int64_t>::max();
  std::atomic<std::int64_t> best{kNone};
#pragma omp parallel for schedule(dynamic, 64)
  for (std::int64_t g = 1; g < count; ++g) {
    if (g >= best.load(std::memory_order_relaxed)) continue;
    if (locality_failure_at(t, static_cast<Mask>(g))) {
      std::int64_t cur = best.load(std::memory_order_relaxed);
      while (g < cur && !best.compare_exchange_weak(cur, g, std::memory_order_relaxed)) {
      }
    }
  }
  if (best.load() != kNone) return locality_failure_at(t, static_cast<Mask>(best.load()));
  return std::nullopt;
}

ExplicitViolatorSpace violator_map_of_abstract(const AbstractLpTable& t) {
  if (auto w = check_abstract_axioms(t)) {
    throw ContractViolation(std::string("abstract table fails ") +
                            (w->axiom == LpAxiom::monotonicity ? "monotonicity" : "locality"));
  }
  const std::size_t n = t.size();
  std::vector<Mask> table(t.values.size(), 0);
  for (std::size_t g = 0; g < table.size(); ++g) {
    const Mask G = static_cast<Mask>(g);
    for (std::size_t h = 0; h < n; ++h) {
      const Mask bit = Mask{1} << h;
      if (t.value(G | bit) > t.value(G)) table[g] |= bit;
    }
  }
  return ExplicitViolatorSpace(std::move(table), t.names);
}

std::vector<Mask> bases_of(const AbstractLpTable& t, Mask G) {
  const auto target = t.value(G);
  std::vector<Mask> same;
  Mask F = G;
  while (true) {
    if (t.value(F) == target) same.push_back(F);
    if (F == 0) break;
    F = (F - 1) & G;
  }
  std::vector<Mask> minimal;
  for (Mask B : same) {
    const bool has_smaller =
        std::any_of(same.begin(), same.end(), [&](Mask C) { return C != B && (C & ~B) == 0; });
    if (!has_smaller) minimal.push_back(B);
  }
  std::sort(minimal.begin(), minimal.end(), [](Mask a, Mask b) { return canonical_less(a, b); });
  return minimal;
}

void ConcreteLpProblem::validate_shape() const {
  if (names.size() != constraints.size()) throw InvalidInstance("one name per constraint required");
  if (constraints.size() > ExplicitViolatorSpace::kMaxSize) {
    throw SizeGuard("concrete problems are limited to 24 constraints");
  }
  for (const auto& c : constraints) {
    if (!std::is_sorted(c.begin(), c.end()) || std::adjacent_find(c.begin(), c.end()) != c.end()) {
      throw InvalidInstance("constraint point lists must be sorted and duplicate-free");
    }
    if (!c.empty() && c.back() >= points.size()) throw InvalidInstance("constraint names an unknown point");
  }
}

std::string class_label(const ExplicitViolatorSpace& space, const BasisStructure& s, std::size_t c) {
  std::string label = "{";
  bool first = true;
  for (Mask m = s.representative(c); m != 0; m &= m - 1) {
    if (!first) label += ",";
    label += space.names()[static_cast<std::size_t>(std::countr_zero(m))];
    first = false;
  }
  return label + "}";
}

ConcreteLpProblem to_concrete(const ExplicitViolatorSpace& space) {
  return to_concrete(space, structure(space));
}

ConcreteLpProblem to_concrete(const ExplicitViolatorSpace& space, const BasisStructure& s) {
  if (!s.acyclic) throw ContractViolation("to_concrete requires an acyclic violator space");
  ConcreteLpProblem p;
  std::vector<std::size_t> position(s.classes.size());
  for (std::size_t i = 0; i < s.linear_extension.size(); ++i) {
    const std::size_t c = s.linear_extension[i];
    position[c] = i;
    p.points.push_back(class_label(space, s, c));
  }
  for (std::size_t h = 0; h < space.size(); ++h) {
    std::vector<std::size_t> members;
    for (std::size_t c = 0; c < s.classes.size(); ++c) {
      if (((s.class_violators[c] >> h) & 1U) == 0) members.push_back(position[c]);
    }
    std::sort(members.begin(), members.end());
    p.constraints.push_back(std::move(members));
  }
  p.names = space.names();
  return p;
}

AbstractLpTable concrete_to_abstract(const ConcreteLpProblem& p) {
  p.validate_shape();
  const std::size_t n = p.constraints.size();
  const std::size_t m = p.points.size();
  const std::size_t words = (m + 63) / 64;

  std::vector<std::vector<std::uint64_t>> bits(n, std::vector<std::uint64_t>(words, 0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t x : p.constraints[i]) bits[i][x / 64] |= std::uint64_t{1} << (x % 64);
  }

  AbstractLpTable t;
  t.names = p.names;
  t.order = p.points;
  t.values.assign(std::size_t{1} << n, AbstractLpTable::kInfinity);

  // Intersections are built incrementally: I(G) = I(G minus its lowest member) & c_low.
  std::vector<std::uint64_t> inter((std::size_t{1} << n) * words, 0);
  for (std::size_t w = 0; w < words; ++w) inter[w] = ~std::uint64_t{0};
  if (m % 64 != 0 && words > 0) inter[words - 1] = (std::uint64_t{1} << (m % 64)) - 1;
  for (std::size_t g = 0; g < t.values.size(); ++g) {
    std::uint64_t* cur = &inter[g * words];
    if (g != 0) {
      const std::size_t low = static_cast<std::size_t>(std::countr_zero(g));
      const std::uint64_t* prev = &inter[(g & (g - 1)) * words];
      for (std::size_t w = 0; w < words; ++w) cur[w] = prev[w] & bits[low][w];
    }
    for (std::size_t w = 0; w < words; ++w) {
      if (cur[w] != 0) {
        t.values[g] = static_cast<AbstractLpTable::Value>(w * 64 + std::countr_zero(cur[w]));
        break;
      }
    }
  }
  return t;
}

}  // namespace vs
