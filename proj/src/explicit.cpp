#include "vspace/explicit.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <limits>
#include <map>
#include <string>

#include "vspace/errors.hpp"

namespace vs {

std::vector<std::string> default_names(std::size_t n) {
  std::vector<std::string> names;
  names.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    names.push_back(n <= 26 ? std::string(1, static_cast<char>('a' + i)) : "h" + std::to_string(i));
  }
  return names;
}

ExplicitViolatorSpace::ExplicitViolatorSpace(std::vector<Mask> table, std::vector<std::string> names)
    : table_(std::move(table)), names_(std::move(names)) {
  if (table_.empty() || !std::has_single_bit(table_.size())) {
    throw InvalidInstance("violator table must have 2^n entries");
  }
  const std::size_t n = static_cast<std::size_t>(std::countr_zero(table_.size()));
  if (n > kMaxSize) throw SizeGuard("explicit violator spaces are limited to 24 constraints");
  if (names_.empty()) names_ = default_names(n);
  if (names_.size() != n) throw InvalidInstance("name list does not match table size");
  const Mask full = full_mask();
  for (Mask v : table_) {
    if ((v & ~full) != 0) throw InvalidInstance("violator entry outside the ground set");
  }
}

ConstraintSet ExplicitViolatorSpace::violators(const ConstraintSet& G) const {
  if (G.universe() != size()) throw ContractViolation("set from a different ground set");
  return ConstraintSet::from_mask(size(), table_[static_cast<Mask>(G.to_mask())]);
}

namespace {

// First F (descending submask order) witnessing a locality failure at G, if any.
std::optional<Mask> locality_failure_at(const ExplicitViolatorSpace& space, Mask G) {
  const Mask vg = space.violators(G);
  Mask F = G;
  while (true) {
    F = (F - 1) & G;
    const Mask vf = space.violators(F);
    if ((G & vf) == 0 && vf != vg) return F;
    if (F == 0) break;
  }
  return std::nullopt;
}

}  // namespace

std::optional<AxiomWitness> check_axioms(const ExplicitViolatorSpace& space) {
  const std::int64_t count = static_cast<std::int64_t>(space.table().size());
  constexpr std::int64_t kNone = std::numeric_limits<std::int64_t>::max();

  std::int64_t bad_consistency = kNone;
#pragma omp parallel for reduction(min : bad_consistency) schedule(static)
  for (std::int64_t g = 0; g < count; ++g) {
    const Mask G = static_cast<Mask>(g);
    if ((G & space.violators(G)) != 0 && g < bad_consistency) bad_consistency = g;
  }
  if (bad_consistency != kNone) {
    const Mask G = static_cast<Mask>(bad_consistency);
    return AxiomWitness{Axiom::consistency, G, G};
  }

  std::atomic<std::int64_t> best{kNone};
#pragma omp parallel for schedule(dynamic, 64)
  for (std::int64_t g = 1; g < count; ++g) {
    if (g >= best.load(std::memory_order_relaxed)) continue;
    if (locality_failure_at(space, static_cast<Mask>(g))) {
      std::int64_t cur = best.load(std::memory_order_relaxed);
      while (g < cur && !best.compare_exchange_weak(cur, g, std::memory_order_relaxed)) {
      }
    }
  }
  if (best.load() != kNone) {
    const Mask G = static_cast<Mask>(best.load());
    return AxiomWitness{Axiom::locality, *locality_failure_at(space, G), G};
  }
  return std::nullopt;
}

bool is_basis(const ExplicitViolatorSpace& space, Mask B) {
  for (Mask rest = B; rest != 0; rest &= rest - 1) {
    const Mask h = rest & (~rest + 1);
    if ((B & space.violators(B & ~h)) == 0) return false;
  }
  return true;
}

std::vector<Mask> enumerate_bases(const ExplicitViolatorSpace& space) {
  std::vector<Mask> bases;
  const std::size_t count = space.table().size();
  for (std::size_t b = 0; b < count; ++b) {
    if (is_basis(space, static_cast<Mask>(b))) bases.push_back(static_cast<Mask>(b));
  }
  std::sort(bases.begin(), bases.end(), [](Mask a, Mask b) { return canonical_less(a, b); });
  return bases;
}

namespace {

std::vector<ConstraintSet::Index> mask_members(Mask m) {
  std::vector<ConstraintSet::Index> out;
  for (; m != 0; m &= m - 1) out.push_back(static_cast<ConstraintSet::Index>(std::countr_zero(m)));
  return out;
}

Mask mask_of(const std::vector<ConstraintSet::Index>& members) {
  Mask m = 0;
  for (auto h : members) m |= Mask{1} << h;
  return m;
}

}  // namespace

Mask basis_of(const ExplicitViolatorSpace& space, Mask G) {
  const Mask target = space.violators(G);
  const auto pool = mask_members(G);
  for (std::size_t k = 0; k <= pool.size(); ++k) {
    std::optional<Mask> found;
    for_each_combination(pool, k, [&](const std::vector<ConstraintSet::Index>& chosen) {
      const Mask B = mask_of(chosen);
      if (space.violators(B) == target) {
        found = B;
        return false;
      }
      return true;
    });
    if (found) return *found;
  }
  // Unreachable: G itself qualifies.
  return G;
}

std::vector<Mask> bases_of(const ExplicitViolatorSpace& space, Mask G) {
  const Mask target = space.violators(G);
  std::vector<Mask> same;
  Mask F = G;
  while (true) {
    if (space.violators(F) == target) same.push_back(F);
    if (F == 0) break;
    F = (F - 1) & G;
  }
  std::vector<Mask> minimal;
  for (Mask B : same) {
    const bool has_smaller = std::any_of(same.begin(), same.end(), [&](Mask C) {
      return C != B && (C & ~B) == 0;
    });
    if (!has_smaller) minimal.push_back(B);
  }
  std::sort(minimal.begin(), minimal.end(), [](Mask a, Mask b) { return canonical_less(a, b); });
  return minimal;
}

std::size_t combinatorial_dimension(const ExplicitViolatorSpace& space) {
  int best = 0;
  const std::size_t count = space.table().size();
  for (std::size_t b = 0; b < count; ++b) {
    const Mask B = static_cast<Mask>(b);
    if (std::popcount(B) > best && is_basis(space, B)) best = std::popcount(B);
  }
  return static_cast<std::size_t>(best);
}

Relation::Relation(std::size_t size) : size_(size), stride_((size + 63) / 64), rows_(size * stride_, 0) {}

void Relation::close_transitively() {
  for (std::size_t k = 0; k < size_; ++k) {
    const std::uint64_t* row_k = &rows_[k * stride_];
    for (std::size_t i = 0; i < size_; ++i) {
      if (!test(i, k)) continue;
      std::uint64_t* row_i = &rows_[i * stride_];
      for (std::size_t w = 0; w < stride_; ++w) row_i[w] |= row_k[w];
    }
  }
}

std::size_t BasisStructure::class_of(Mask basis) const {
  for (std::size_t c = 0; c < classes.size(); ++c) {
    if (std::find(classes[c].begin(), classes[c].end(), basis) != classes[c].end()) return c;
  }
  throw ContractViolation("set is not a basis of this space");
}

namespace {

// Depth-first search for a directed cycle through distinct classes in the
// strict part of leq0. Returns the cycle rotated to start at its smallest class.
std::vector<std::size_t> find_cycle(const Relation& leq0) {
  const std::size_t k = leq0.size();
  std::vector<int> color(k, 0);
  std::vector<std::size_t> stack;
  std::vector<std::size_t> cycle;

  auto dfs = [&](auto&& self, std::size_t u) -> bool {
    color[u] = 1;
    stack.push_back(u);
    for (std::size_t v = 0; v < k; ++v) {
      if (v == u || !leq0.test(u, v)) continue;
      if (color[v] == 1) {
        auto it = std::find(stack.begin(), stack.end(), v);
        cycle.assign(it, stack.end());
        return true;
      }
      if (color[v] == 0 && self(self, v)) return true;
    }
    stack.pop_back();
    color[u] = 2;
    return false;
  };

  for (std::size_t s = 0; s < k && cycle.empty(); ++s) {
    if (color[s] == 0) dfs(dfs, s);
  }
  if (!cycle.empty()) {
    std::rotate(cycle.begin(), std::min_element(cycle.begin(), cycle.end()), cycle.end());
  }
  return cycle;
}

}  // namespace

BasisStructure structure(const ExplicitViolatorSpace& space) {
  BasisStructure out;
  out.bases = enumerate_bases(space);

  std::map<Mask, std::size_t> by_violators;
  std::vector<std::size_t> class_index(out.bases.size());
  for (std::size_t i = 0; i < out.bases.size(); ++i) {
    const Mask v = space.violators(out.bases[i]);
    auto [it, inserted] = by_violators.emplace(v, out.classes.size());
    if (inserted) {
      out.classes.emplace_back();
      out.class_violators.push_back(v);
    }
    out.classes[it->second].push_back(out.bases[i]);
    class_index[i] = it->second;
  }

  const std::size_t k = out.classes.size();
  out.leq0 = Relation(k);
  for (std::size_t i = 0; i < out.bases.size(); ++i) {
    for (std::size_t c = 0; c < k; ++c) {
      if ((out.bases[i] & out.class_violators[c]) == 0) out.leq0.set(class_index[i], c);
    }
  }
  out.leq1 = out.leq0;
  out.leq1.close_transitively();

  for (std::size_t i = 0; i < k && out.acyclic; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      if (out.leq1.test(i, j) && out.leq1.test(j, i)) {
        out.acyclic = false;
        break;
      }
    }
  }

  if (!out.acyclic) {
    out.cycle = find_cycle(out.leq0);
    return out;
  }

  // Kahn's algorithm on the strict part of leq1; classes are indexed in
  // canonical order of their representatives, so the least available index wins.
  std::vector<std::size_t> indegree(k, 0);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      if (i != j && out.leq1.test(i, j)) ++indegree[j];
    }
  }
  std::vector<bool> done(k, false);
  for (std::size_t step = 0; step < k; ++step) {
    std::size_t pick = k;
    for (std::size_t c = 0; c < k; ++c) {
      if (!done[c] && indegree[c] == 0) {
        pick = c;
        break;
      }
    }
    done[pick] = true;
    out.linear_extension.push_back(pick);
    for (std::size_t j = 0; j < k; ++j) {
      if (j != pick && out.leq1.test(pick, j)) --indegree[j];
    }
  }
  return out;
}

TableOracle::TableOracle(std::shared_ptr<const ExplicitViolatorSpace> space,
                         std::optional<std::size_t> delta)
    : ViolationOracle(space->size(),
                      delta.value_or(std::max<std::size_t>(1, combinatorial_dimension(*space)))),
      space_(std::move(space)) {}

ConstraintSet TableOracle::violator_set(const ConstraintSet& G) const { return space_->violators(G); }

bool TableOracle::test_violation(const ConstraintSet& G, ConstraintSet::Index h) const {
  return (space_->violators(static_cast<Mask>(G.to_mask())) >> h) & 1U;
}

ExplicitViolatorSpace random_violator_space(std::size_t n, std::size_t max_dimension, Rng& rng,
                                            std::uint64_t max_attempts) {
  if (n > 12) throw SizeGuard("random violator spaces are limited to 12 elements");
  const Mask full = n == 0 ? 0 : static_cast<Mask>((std::uint64_t{1} << n) - 1);
  std::vector<Mask> by_size(std::size_t{1} << n);
  for (std::size_t g = 0; g < by_size.size(); ++g) by_size[g] = static_cast<Mask>(g);
  std::stable_sort(by_size.begin(), by_size.end(),
                   [](Mask a, Mask b) { return std::popcount(a) < std::popcount(b); });
  std::vector<Mask> table(by_size.size());
  for (std::uint64_t attempt = 0; attempt < max_attempts; ++attempt) {
    bool ok = true;
    for (Mask G : by_size) {
      std::optional<Mask> forced;
      for (Mask F = (G - 1) & G;; F = (F - 1) & G) {
        if (F != G && (table[F] & G) == 0) {
          if (forced && *forced != table[F]) {
            ok = false;
            break;
          }
          forced = table[F];
        }
        if (F == 0) break;
      }
      if (!ok) break;
      if (forced) {
        table[G] = *forced;
      } else if (static_cast<std::size_t>(std::popcount(G)) > max_dimension) {
        ok = false;
        break;
      } else {
        table[G] = static_cast<Mask>(rng.next()) & full & ~G;
      }
    }
    if (ok) return ExplicitViolatorSpace(table);
  }
  throw GenerationExhausted("no violator space found in " + std::to_string(max_attempts) + " attempts");
}

CyclicProbe probe_cyclic(std::size_t n, std::size_t max_dimension, std::uint64_t samples, Rng& rng) {
  CyclicProbe probe;
  for (; probe.samples < samples; ++probe.samples) {
    auto s = random_violator_space(n, max_dimension, rng);
    if (!structure(s).acyclic) {
      if (!probe.first_cyclic) probe.first_cyclic = std::move(s);
      ++probe.cyclic;
    }
  }
  return probe;
}

namespace fixtures {

ExplicitViolatorSpace cyclic_three() {
  constexpr Mask f = 1, g = 2, h = 4;
  std::vector<Mask> table(8);
  table[0] = f | g | h;
  table[f] = h;
  table[g] = f;
  table[h] = g;
  table[f | g] = h;
  table[f | h] = g;
  table[g | h] = f;
  table[f | g | h] = 0;
  return ExplicitViolatorSpace(std::move(table), {"f", "g", "h"});
}

ExplicitViolatorSpace square() {
  constexpr Mask a = 1, b = 2, c = 4, d = 8;
  std::vector<Mask> table(16, 0);
  table[0] = a | b | c | d;
  table[a] = b | c | d;
  table[b] = a | c | d;
  table[c] = a | b | d;
  table[d] = a | b | c;
  table[a | b] = c | d;
  table[a | c] = 0;
  table[a | d] = b | c;
  table[b | c] = a | d;
  table[b | d] = 0;
  table[c | d] = a | b;
  // Every triple and the full set have no violators.
  return ExplicitViolatorSpace(std::move(table), {"a", "b", "c", "d"});
}

}  // namespace fixtures

}  // namespace vs
