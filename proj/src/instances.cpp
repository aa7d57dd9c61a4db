#include "vspace/instances.hpp"

#include <atomic>
#include <cctype>
#include <list>
#include <string>

#include "vspace/errors.hpp"

namespace vs {

namespace {

// Solvers ask about many h against the same G in a row; each thread keeps the
// geometry of the last G it saw. Owners are identified by a process-unique id
// so a destroyed oracle's entry can never be reused.
template <class Value>
struct LastQuery {
  std::uint64_t owner = 0;
  ConstraintSet G;
  Value value;
};

std::uint64_t next_cache_id() {
  static std::atomic<std::uint64_t> counter{0};
  return ++counter;
}

}  // namespace

Rational parse_rational(const std::string& raw) {
  std::string text;
  for (char ch : raw) {
    if (!std::isspace(static_cast<unsigned char>(ch))) text.push_back(ch);
  }
  auto bad = [&]() { return ParseError("not a rational number: '" + raw + "'"); };
  if (text.empty()) throw bad();

  const auto dot = text.find('.');
  if (dot != std::string::npos) {
    if (text.find('/') != std::string::npos) throw bad();
    std::string digits = text.substr(0, dot) + text.substr(dot + 1);
    const std::size_t frac_len = text.size() - dot - 1;
    if (digits.empty() || digits == "-" || digits == "+") throw bad();
    for (std::size_t i = 0; i < digits.size(); ++i) {
      const bool sign = i == 0 && (digits[i] == '-' || digits[i] == '+');
      if (!sign && !std::isdigit(static_cast<unsigned char>(digits[i]))) throw bad();
    }
    if (digits[0] == '+') digits.erase(0, 1);
    Rational q(mpz_class(digits, 10), 1);
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, frac_len);
    q /= den;
    return q;
  }

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    const bool sign = (ch == '-' || ch == '+') && (i == 0 || text[i - 1] == '/');
    if (!sign && ch != '/' && !std::isdigit(static_cast<unsigned char>(ch))) throw bad();
  }
  std::string cleaned = text;
  if (cleaned[0] == '+') cleaned.erase(0, 1);
  Rational q;
  if (q.set_str(cleaned, 10) != 0) throw bad();
  if (q.get_den() == 0) throw ParseError("zero denominator in '" + raw + "'");
  q.canonicalize();
  return q;
}

void PointSet::validate() const {
  if (names.size() != points.size()) throw InvalidInstance("one name per point required");
  for (const auto& p : points) {
    if (p.size() != dimension) throw InvalidInstance("point with wrong number of coordinates");
  }
}

bool Ball::contains(const std::vector<Rational>& p) const {
  if (empty) return false;
  Rational dist = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Rational diff = p[i] - center[i];
    dist += diff * diff;
  }
  return dist <= squared_radius;
}

namespace {

// Smallest ball with every support point on its boundary: its center lies in
// the affine hull, c = p0 + sum_j l_j (p_j - p0), with
// 2 (p_i - p0).(c - p0) = |p_i - p0|^2 for every i. Support sets produced by
// the recursion are affinely independent, so the Gram system is regular.
Ball ball_through(const PointSet& ps, const std::vector<std::size_t>& support) {
  Ball ball;
  if (support.empty()) return ball;
  const std::size_t d = ps.dimension;
  const auto& p0 = ps.points[support[0]];
  ball.empty = false;
  ball.center = p0;
  ball.squared_radius = 0;
  const std::size_t k = support.size() - 1;
  if (k == 0) return ball;

  std::vector<std::vector<Rational>> diff(k, std::vector<Rational>(d));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t c = 0; c < d; ++c) diff[i][c] = ps.points[support[i + 1]][c] - p0[c];
  }
  // Augmented system [A | b].
  std::vector<std::vector<Rational>> m(k, std::vector<Rational>(k + 1));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      Rational dot = 0;
      for (std::size_t c = 0; c < d; ++c) dot += diff[i][c] * diff[j][c];
      m[i][j] = 2 * dot;
    }
    Rational sq = 0;
    for (std::size_t c = 0; c < d; ++c) sq += diff[i][c] * diff[i][c];
    m[i][k] = sq;
  }
  for (std::size_t col = 0; col < k; ++col) {
    std::size_t pivot = col;
    while (pivot < k && m[pivot][col] == 0) ++pivot;
    if (pivot == k) throw InvalidInstance("affinely dependent support set in ball computation");
    std::swap(m[pivot], m[col]);
    for (std::size_t row = 0; row < k; ++row) {
      if (row == col || m[row][col] == 0) continue;
      const Rational factor = m[row][col] / m[col][col];
      for (std::size_t j = col; j <= k; ++j) m[row][j] -= factor * m[col][j];
    }
  }
  for (std::size_t i = 0; i < k; ++i) {
    const Rational lambda = m[i][k] / m[i][i];
    for (std::size_t c = 0; c < d; ++c) ball.center[c] += lambda * diff[i][c];
  }
  for (std::size_t c = 0; c < d; ++c) {
    const Rational r = ball.center[c] - p0[c];
    ball.squared_radius += r * r;
  }
  return ball;
}

class MoveToFront {
 public:
  MoveToFront(const PointSet& ps, const ConstraintSet& subset) : ps_(ps) {
    subset.for_each([&](ConstraintSet::Index h) { order_.push_back(h); });
  }

  Ball run() {
    solve(order_.end());
    return ball_;
  }

 private:
  void solve(std::list<std::size_t>::iterator end) {
    ball_ = ball_through(ps_, support_);
    if (support_.size() == ps_.dimension + 1) return;
    for (auto it = order_.begin(); it != end;) {
      auto cur = it++;
      if (!ball_.contains(ps_.points[*cur])) {
        support_.push_back(*cur);
        solve(cur);
        support_.pop_back();
        order_.splice(order_.begin(), order_, cur);
      }
    }
  }

  const PointSet& ps_;
  std::list<std::size_t> order_;
  std::vector<std::size_t> support_;
  Ball ball_;
};

}  // namespace

Ball smallest_enclosing_ball(const PointSet& ps, const ConstraintSet& subset) {
  return MoveToFront(ps, subset).run();
}

MiniballOracle::MiniballOracle(PointSet ps, std::optional<std::size_t> delta)
    : ViolationOracle(ps.size(), delta.value_or(ps.dimension + 1)), ps_(std::move(ps)), cache_id_(next_cache_id()) {
  if (ps_.size() == 0) throw InvalidInstance("miniball instance needs at least one point");
  if (ps_.dimension > kMaxDimension) throw SizeGuard("miniball dimension above 10");
  ps_.validate();
}

ConstraintSet MiniballOracle::violator_set(const ConstraintSet& G) const {
  const Ball ball = smallest_enclosing_ball(ps_, G);
  ConstraintSet out(size());
  for (std::size_t h = 0; h < size(); ++h) {
    if (!G.contains(h) && !ball.contains(ps_.points[h])) out.insert(h);
  }
  return out;
}

bool MiniballOracle::test_violation(const ConstraintSet& G, ConstraintSet::Index h) const {
  thread_local LastQuery<Ball> last;
  if (last.owner != cache_id_ || last.G != G) {
    last = {cache_id_, G, smallest_enclosing_ball(ps_, G)};
    evaluations_.fetch_add(1, std::memory_order_relaxed);
  }
  return !last.value.contains(ps_.points[h]);
}

namespace {

/// Lexicographic (y, x) minimum on the line a x + b y = c subject to the
/// orthant and `bounds`; nullopt if that segment is empty.
std::optional<Point2> optimum_on_line(const Halfplane& line, const std::vector<const Halfplane*>& bounds) {
  // Parametrize by t: (x, y) = origin + t * dir, with dir along the line.
  Point2 origin;
  Point2 dir;
  if (line.b != 0) {
    origin = {0, line.c / line.b};
    dir = {1, -line.a / line.b};
  } else {
    origin = {line.c / line.a, 0};
    dir = {0, 1};
  }
  std::optional<Rational> lo;
  std::optional<Rational> hi;
  auto restrict = [&](const Rational& a, const Rational& b, const Rational& c) {
    // a x + b y <= c  becomes  alpha t <= beta.
    const Rational alpha = a * dir.x + b * dir.y;
    const Rational beta = c - a * origin.x - b * origin.y;
    if (alpha == 0) return beta >= 0;
    const Rational t = beta / alpha;
    if (alpha > 0) {
      if (!hi || t < *hi) hi = t;
    } else if (!lo || t > *lo) {
      lo = t;
    }
    return true;
  };
  if (!restrict(-1, 0, 0) || !restrict(0, -1, 0)) return std::nullopt;
  for (const Halfplane* g : bounds) {
    if (!restrict(g->a, g->b, g->c)) return std::nullopt;
  }
  if (lo && hi && *lo > *hi) return std::nullopt;
  // Decreasing t lowers y when dir.y > 0; with dir.y == 0 it lowers x (dir.x = 1).
  const bool go_low = dir.y > 0 || (dir.y == 0 && dir.x > 0);
  const std::optional<Rational>& end = go_low ? lo : hi;
  // The orthant bounds t on the side that lowers the objective.
  return Point2{origin.x + *end * dir.x, origin.y + *end * dir.y};
}

}  // namespace

// Incremental: the optimum only moves when a new constraint cuts it off, and
// then the new optimum lies on that constraint's line.
std::optional<Point2> lp_optimum(const HalfplaneLp& lp, const ConstraintSet& subset) {
  Point2 opt{0, 0};
  std::vector<const Halfplane*> seen;
  seen.reserve(subset.size());
  bool ok = true;
  subset.for_each([&](ConstraintSet::Index h) {
    if (!ok) return;
    const Halfplane& hp = lp.halfplanes[h];
    if (!hp.contains(opt.x, opt.y)) {
      if (hp.a == 0 && hp.b == 0) {
        ok = false;
        return;
      }
      auto next = optimum_on_line(hp, seen);
      if (!next) {
        ok = false;
        return;
      }
      opt = std::move(*next);
    }
    seen.push_back(&hp);
  });
  if (!ok) return std::nullopt;
  return opt;
}

Lp2dOracle::Lp2dOracle(HalfplaneLp lp, std::optional<std::size_t> delta)
    : ViolationOracle(lp.size(), delta.value_or(2)), lp_(std::move(lp)), cache_id_(next_cache_id()) {
  if (lp_.names.size() != lp_.halfplanes.size()) throw InvalidInstance("one name per halfplane required");
  if (!lp_optimum(lp_, ground_set())) {
    throw InvalidInstance("the halfplanes have no common point in the positive orthant");
  }
}

Point2 Lp2dOracle::optimum(const ConstraintSet& G) const {
  auto p = lp_optimum(lp_, G);
  // Subsets of a feasible system are feasible.
  return *p;
}

ConstraintSet Lp2dOracle::violator_set(const ConstraintSet& G) const {
  const Point2 opt = optimum(G);
  ConstraintSet out(size());
  for (std::size_t h = 0; h < size(); ++h) {
    if (!G.contains(h) && !lp_.halfplanes[h].contains(opt.x, opt.y)) out.insert(h);
  }
  return out;
}

bool Lp2dOracle::test_violation(const ConstraintSet& G, ConstraintSet::Index h) const {
  thread_local LastQuery<Point2> last;
  if (last.owner != cache_id_ || last.G != G) {
    last = {cache_id_, G, optimum(G)};
    evaluations_.fetch_add(1, std::memory_order_relaxed);
  }
  return !lp_.halfplanes[h].contains(last.value.x, last.value.y);
}

ExplicitViolatorSpace tabulate(const ViolationOracle& oracle, std::vector<std::string> names) {
  const std::size_t n = oracle.size();
  if (n > kMaxTabulateSize) {
    throw SizeGuard("tabulation is limited to " + std::to_string(kMaxTabulateSize) + " constraints");
  }
  std::vector<Mask> table(std::size_t{1} << n, 0);
  const auto count = static_cast<std::int64_t>(table.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t g = 0; g < count; ++g) {
    const auto G = ConstraintSet::from_mask(n, static_cast<std::uint64_t>(g));
    table[static_cast<std::size_t>(g)] = static_cast<Mask>(oracle.violator_set(G).to_mask());
  }
  return ExplicitViolatorSpace(std::move(table), std::move(names));
}

namespace fixtures {

PointSet unit_square() {
  PointSet ps;
  ps.dimension = 2;
  ps.points = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  ps.names = {"a", "b", "c", "d"};
  return ps;
}

HalfplaneLp lp_figure4() {
  // a, b bound the optimum from the left (lines through (2,2) with slopes -1, -2),
  // c, d from the right (slopes 1/2, 1/4). Optima of single constraints:
  // A = (4,0), B = (3,0), C = (0,1), D = (0,3/2); any left/right pair meets at Q = (2,2).
  HalfplaneLp lp;
  lp.halfplanes = {{-1, -1, -4}, {-2, -1, -6}, {1, -2, -2}, {1, -4, -6}};
  lp.names = {"a", "b", "c", "d"};
  return lp;
}

HalfplaneLp lp_figure5() {
  // opt{h1,h2} = (2,2) lies in h*, opt{h1,h2,h3} = (1,3) does not.
  HalfplaneLp lp;
  lp.halfplanes = {{-1, -1, -4}, {1, -2, -2}, {0, -1, -3}, {-2, 0, -3}};
  lp.names = {"h1", "h2", "h3", "hstar"};
  return lp;
}

}  // namespace fixtures

}  // namespace vs
