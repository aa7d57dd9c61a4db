#pragma once

#include <gmpxx.h>

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vspace/constraint_set.hpp"
#include "vspace/explicit.hpp"
#include "vspace/oracle.hpp"

namespace vs {

using Rational = mpq_class;

/// Parses "p/q", an integer, or a finite decimal such as "-0.25" exactly.
Rational parse_rational(const std::string& text);

struct PointSet {
  std::size_t dimension = 0;
  std::vector<std::vector<Rational>> points;
  std::vector<std::string> names;

  std::size_t size() const { return points.size(); }
  void validate() const;
};

/// Smallest enclosing ball with exact center and squared radius.
/// `empty` marks the ball of the empty set, which contains no point.
struct Ball {
  bool empty = true;
  std::vector<Rational> center;
  Rational squared_radius;

  /// Boundary points count as contained.
  bool contains(const std::vector<Rational>& p) const;

  friend bool operator==(const Ball&, const Ball&) = default;
};

/// Smallest ball enclosing the points of `subset` (move-to-front Welzl
/// recursion, exact arithmetic).
Ball smallest_enclosing_ball(const PointSet& ps, const ConstraintSet& subset);

/// h violates G iff h lies strictly outside the smallest ball of G.
/// delta = d + 1 unless overridden; one primitive call per query however
/// deep the ball computation goes.
class MiniballOracle final : public ViolationOracle {
 public:
  static constexpr std::size_t kMaxDimension = 10;

  explicit MiniballOracle(PointSet ps, std::optional<std::size_t> delta = std::nullopt);

  const PointSet& points() const { return ps_; }
  ConstraintSet violator_set(const ConstraintSet& G) const override;
  /// Balls computed while answering violation tests.
  std::optional<InternalCost> internal_cost() const override {
    return InternalCost{"ball_computations", evaluations_.load(std::memory_order_relaxed)};
  }

 protected:
  bool test_violation(const ConstraintSet& G, ConstraintSet::Index h) const override;

 private:
  PointSet ps_;
  std::uint64_t cache_id_;
  mutable std::atomic<std::uint64_t> evaluations_{0};
};

/// Halfplane a x + b y <= c.
struct Halfplane {
  Rational a;
  Rational b;
  Rational c;

  bool contains(const Rational& x, const Rational& y) const { return a * x + b * y <= c; }
};

/// Two-variable LP over the positive orthant x, y >= 0 (implicit, not part
/// of H): minimize y, then x.
struct HalfplaneLp {
  std::vector<Halfplane> halfplanes;
  std::vector<std::string> names;

  std::size_t size() const { return halfplanes.size(); }
};

struct Point2 {
  Rational x;
  Rational y;
  friend bool operator==(const Point2&, const Point2&) = default;
};

/// Lexicographic optimum (y, then x) of the orthant cut by the halfplanes in
/// `subset`; nullopt if that region is empty.
std::optional<Point2> lp_optimum(const HalfplaneLp& lp, const ConstraintSet& subset);

/// h violates G iff the optimum of G lies outside halfplane h. delta = 2.
/// Construction throws InvalidInstance when the full constraint set is
/// infeasible; then every subset is feasible and queries never see an empty region.
class Lp2dOracle final : public ViolationOracle {
 public:
  explicit Lp2dOracle(HalfplaneLp lp, std::optional<std::size_t> delta = std::nullopt);

  const HalfplaneLp& lp() const { return lp_; }
  Point2 optimum(const ConstraintSet& G) const;
  ConstraintSet violator_set(const ConstraintSet& G) const override;
  /// Optima computed while answering violation tests.
  std::optional<InternalCost> internal_cost() const override {
    return InternalCost{"optimum_computations", evaluations_.load(std::memory_order_relaxed)};
  }

 protected:
  bool test_violation(const ConstraintSet& G, ConstraintSet::Index h) const override;

 private:
  HalfplaneLp lp_;
  std::uint64_t cache_id_;
  mutable std::atomic<std::uint64_t> evaluations_{0};
};

/// Full table of an oracle (uncounted queries), OpenMP-parallel over subsets.
/// Names default to a, b, c, ...
ExplicitViolatorSpace tabulate(const ViolationOracle& oracle, std::vector<std::string> names = {});

inline constexpr std::size_t kMaxTabulateSize = 16;

namespace fixtures {
/// Unit square a=(0,0), b=(1,0), c=(1,1), d=(0,1).
PointSet unit_square();
/// Four halfplanes in the orthant whose basis classes are O, A, B, C, D, Q.
HalfplaneLp lp_figure4();
/// h1, h2, h3 and a probe h* with h* not in V({h1,h2}) but h* in V({h1,h2,h3}).
HalfplaneLp lp_figure5();
}  // namespace fixtures

}  // namespace vs
