#pragma once

// Test-side generators and brute-force oracles. Everything here is written
// from the definitions and shares no code with the library beyond data types.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <memory>
#include <vector>

#include "vspace/explicit.hpp"
#include "vspace/grid_uso.hpp"
#include "vspace/instances.hpp"
#include "vspace/lp_type.hpp"
#include "vspace/rng.hpp"

namespace vs::test {

inline bool subset(Mask a, Mask b) { return (a & ~b) == 0; }

/// B is a basis iff every proper subset F of B has B meeting V(F).
inline bool brute_is_basis(const ExplicitViolatorSpace& s, Mask B) {
  for (Mask F = 0; F <= B; ++F) {
    if (!subset(F, B) || F == B) continue;
    if ((B & s.violators(F)) == 0) return false;
  }
  return true;
}

inline std::vector<Mask> brute_bases(const ExplicitViolatorSpace& s) {
  std::vector<Mask> out;
  for (Mask B = 0; B <= s.full_mask(); ++B) {
    if (brute_is_basis(s, B)) out.push_back(B);
  }
  return out;
}

/// Inclusion-minimal B inside G with V(B) = V(G).
inline std::vector<Mask> brute_bases_of(const ExplicitViolatorSpace& s, Mask G) {
  std::vector<Mask> same;
  for (Mask B = 0; B <= G; ++B) {
    if (subset(B, G) && s.violators(B) == s.violators(G)) same.push_back(B);
  }
  std::vector<Mask> out;
  for (Mask B : same) {
    bool minimal = true;
    for (Mask C : same) minimal = minimal && !(C != B && subset(C, B));
    if (minimal) out.push_back(B);
  }
  return out;
}

inline std::size_t brute_dimension(const ExplicitViolatorSpace& s) {
  std::size_t d = 0;
  for (Mask B : brute_bases(s)) d = std::max<std::size_t>(d, std::popcount(B));
  return d;
}

inline bool brute_consistent(const ExplicitViolatorSpace& s) {
  for (Mask G = 0; G <= s.full_mask(); ++G) {
    if (G & s.violators(G)) return false;
  }
  return true;
}

inline bool brute_local(const ExplicitViolatorSpace& s) {
  for (Mask G = 0; G <= s.full_mask(); ++G) {
    for (Mask F = 0; F <= G; ++F) {
      if (subset(F, G) && (G & s.violators(F)) == 0 && s.violators(F) != s.violators(G)) return false;
    }
  }
  return true;
}

/// Random concrete LP-type problem: `points` ordered points, each constraint a
/// random subset of them.
inline ConcreteLpProblem random_concrete(std::size_t n, std::size_t points, Rng& rng) {
  ConcreteLpProblem p;
  for (std::size_t i = 0; i < points; ++i) p.points.push_back("p" + std::to_string(i));
  for (std::size_t h = 0; h < n; ++h) {
    std::vector<std::size_t> c;
    for (std::size_t i = 0; i < points; ++i) {
      if (rng.below(std::uint64_t{3}) != 0) c.push_back(i);
    }
    p.constraints.push_back(std::move(c));
  }
  p.names = default_names(n);
  return p;
}

/// Violator map of w(G) = min of the intersection, computed from scratch.
inline ExplicitViolatorSpace brute_space_of_concrete(const ConcreteLpProblem& p) {
  const std::size_t n = p.constraints.size();
  const std::size_t full = (std::size_t{1} << n);
  std::vector<std::int64_t> w(full);
  const std::int64_t inf = static_cast<std::int64_t>(p.points.size());
  for (std::size_t G = 0; G < full; ++G) {
    w[G] = inf;
    for (std::size_t x = 0; x < p.points.size(); ++x) {
      bool in_all = true;
      for (std::size_t h = 0; h < n && in_all; ++h) {
        if ((G >> h) & 1) {
          const auto& c = p.constraints[h];
          in_all = std::find(c.begin(), c.end(), x) != c.end();
        }
      }
      if (in_all) {
        w[G] = static_cast<std::int64_t>(x);
        break;
      }
    }
  }
  std::vector<Mask> table(full, 0);
  for (std::size_t G = 0; G < full; ++G) {
    for (std::size_t h = 0; h < n; ++h) {
      if (!((G >> h) & 1) && w[G | (std::size_t{1} << h)] > w[G]) table[G] |= Mask{1} << h;
    }
  }
  return ExplicitViolatorSpace(std::move(table), p.names);
}

inline ExplicitViolatorSpace random_acyclic_space(std::size_t n, Rng& rng) {
  const std::size_t points = 2 + rng.below(std::uint64_t{10});
  return brute_space_of_concrete(random_concrete(n, points, rng));
}

/// Feasible grid shapes for rejection-sampled USOs with n <= 10.
inline const std::vector<std::vector<std::size_t>>& uso_shapes() {
  static const std::vector<std::vector<std::size_t>> shapes = {
      {1}, {2}, {3}, {4}, {5}, {2, 2}, {3, 2}, {2, 3}, {4, 2}, {2, 2, 2}, {3, 2, 2}, {1, 2}, {1, 3}, {2, 1, 2}};
  return shapes;
}

/// All vertices J inside G with s(J) disjoint from G, by scanning every vertex.
inline std::vector<Vertex> brute_sinks(const GridUso& u, const ConstraintSet& G) {
  std::vector<Vertex> out;
  for (std::uint64_t id = 0; id < u.partition().vertex_count(); ++id) {
    const Vertex J = u.vertex_at(id);
    if (J.as_set(u.size()).is_subset_of(G) && !u.outmap(J).intersects(G)) out.push_back(J);
  }
  return out;
}

}  // namespace vs::test
