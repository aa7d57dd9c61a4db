#include "vspace/grid_uso.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>
#include <utility>

#include "vspace/errors.hpp"

namespace vs {

namespace {

constexpr std::uint64_t kMaxMaterialize = std::uint64_t{1} << 22;

std::string vertex_text(const Vertex& J) {
  std::string s = "{";
  for (std::size_t i = 0; i < J.elements.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(J.elements[i]);
  }
  return s + "}";
}

// Odometer over the vertices of the subgrid spanned by G.
template <class Fn>
void for_each_subgrid_vertex(const GridPartition& p, const ConstraintSet& G, Fn&& fn) {
  std::vector<std::vector<std::size_t>> choices(p.block_count());
  G.for_each([&](ConstraintSet::Index h) { choices[p.block_of(h)].push_back(h); });
  for (const auto& c : choices) {
    if (c.empty()) return;
  }
  std::vector<std::size_t> digit(choices.size(), 0);
  Vertex J;
  J.elements.resize(choices.size());
  while (true) {
    for (std::size_t i = 0; i < choices.size(); ++i) J.elements[i] = choices[i][digit[i]];
    if (!fn(J)) return;
    std::size_t i = 0;
    while (i < digit.size() && ++digit[i] == choices[i].size()) digit[i++] = 0;
    if (i == digit.size()) return;
  }
}

}  // namespace

GridPartition::GridPartition(std::vector<std::vector<std::size_t>> blocks) : blocks_(std::move(blocks)) {
  std::size_t n = 0;
  for (auto& b : blocks_) {
    if (b.empty()) throw InvalidInstance("partition blocks must be nonempty");
    std::sort(b.begin(), b.end());
    n += b.size();
  }
  block_of_.assign(n, std::numeric_limits<std::size_t>::max());
  position_.assign(n, 0);
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    for (std::size_t p = 0; p < blocks_[i].size(); ++p) {
      const std::size_t h = blocks_[i][p];
      if (h >= n) throw InvalidInstance("partition element " + std::to_string(h) + " out of range");
      if (block_of_[h] != std::numeric_limits<std::size_t>::max()) {
        throw InvalidInstance("element " + std::to_string(h) + " appears in two blocks");
      }
      block_of_[h] = i;
      position_[h] = p;
    }
  }
}

GridPartition GridPartition::consecutive(const std::vector<std::size_t>& sizes) {
  std::vector<std::vector<std::size_t>> blocks;
  std::size_t next = 0;
  for (auto s : sizes) {
    std::vector<std::size_t> b(s);
    std::iota(b.begin(), b.end(), next);
    next += s;
    blocks.push_back(std::move(b));
  }
  return GridPartition(std::move(blocks));
}

ConstraintSet GridPartition::block_set(std::size_t i) const { return ConstraintSet(size(), blocks_.at(i)); }

bool GridPartition::is_valid(const ConstraintSet& G) const {
  std::vector<char> hit(block_count(), 0);
  std::size_t count = 0;
  G.for_each([&](ConstraintSet::Index h) {
    char& b = hit[block_of_[h]];
    if (!b) {
      b = 1;
      ++count;
    }
  });
  return count == block_count();
}

bool GridPartition::is_vertex(const ConstraintSet& G) const { return G.size() == block_count() && is_valid(G); }

Vertex GridPartition::vertex_of(const ConstraintSet& G) const {
  if (G.universe() != size() || !is_vertex(G)) throw ContractViolation("set is not a vertex of the grid");
  Vertex J;
  J.elements.resize(block_count());
  G.for_each([&](ConstraintSet::Index h) { J.elements[block_of_[h]] = h; });
  return J;
}

ConstraintSet GridPartition::missing_blocks(const ConstraintSet& G) const {
  std::vector<char> hit(block_count(), 0);
  G.for_each([&](ConstraintSet::Index h) { hit[block_of_[h]] = 1; });
  ConstraintSet out(size());
  for (std::size_t i = 0; i < block_count(); ++i) {
    if (!hit[i]) {
      for (auto h : blocks_[i]) out.insert(h);
    }
  }
  return out;
}

std::uint64_t GridPartition::vertex_count() const {
  std::uint64_t count = 1;
  for (const auto& b : blocks_) {
    if (count > std::numeric_limits<std::uint64_t>::max() / b.size()) {
      throw SizeGuard("grid has more than 2^64 vertices");
    }
    count *= b.size();
  }
  return count;
}

GridUso::GridUso(GridPartition partition, std::vector<ConstraintSet> outmaps)
    : partition_(std::move(partition)), rep_(Dense{std::move(outmaps)}) {
  const auto& out = std::get<Dense>(rep_).outmaps;
  if (out.size() != partition_.vertex_count()) {
    throw InvalidInstance("expected one outmap per vertex (" + std::to_string(partition_.vertex_count()) +
                          "), got " + std::to_string(out.size()));
  }
  check_edges();
}

GridUso::GridUso(GridPartition partition, std::shared_ptr<const GridUso> base, std::vector<std::size_t> image,
                 std::vector<std::size_t> rank)
    : partition_(std::move(partition)), rep_(Derived{std::move(base), std::move(image), std::move(rank)}) {
  const auto& d = std::get<Derived>(rep_);
  const std::size_t n = partition_.size();
  if (!d.base) throw InvalidInstance("derived orientation needs a base");
  if (d.base->block_count() != partition_.block_count()) {
    throw InvalidInstance("base grid has a different number of blocks");
  }
  if (d.image.size() != n || d.rank.size() != n) throw InvalidInstance("one image and rank per element required");
  std::vector<std::pair<std::size_t, std::size_t>> keys;
  for (std::size_t h = 0; h < n; ++h) {
    if (d.image[h] >= d.base->size() || d.base->partition().block_of(d.image[h]) != partition_.block_of(h)) {
      throw InvalidInstance("image of element " + std::to_string(h) + " is not in the matching base block");
    }
    keys.emplace_back(d.image[h], d.rank[h]);
  }
  std::sort(keys.begin(), keys.end());
  if (std::adjacent_find(keys.begin(), keys.end()) != keys.end()) {
    throw InvalidInstance("elements sharing an image need distinct ranks");
  }
}

std::uint64_t GridUso::vertex_id(const Vertex& J) const {
  if (J.elements.size() != block_count()) throw ContractViolation("vertex has the wrong number of blocks");
  std::uint64_t id = 0;
  std::uint64_t stride = 1;
  for (std::size_t i = 0; i < block_count(); ++i) {
    const std::size_t h = J.elements[i];
    if (h >= size() || partition_.block_of(h) != i) throw ContractViolation("vertex element outside its block");
    id += stride * partition_.position_of(h);
    stride *= partition_.block(i).size();
  }
  return id;
}

Vertex GridUso::vertex_at(std::uint64_t id) const {
  Vertex J;
  J.elements.resize(block_count());
  for (std::size_t i = 0; i < block_count(); ++i) {
    const auto& b = partition_.block(i);
    J.elements[i] = b[id % b.size()];
    id /= b.size();
  }
  return J;
}

bool GridUso::outgoing(const Vertex& J, std::size_t j) const {
  if (const auto* dense = std::get_if<Dense>(&rep_)) return dense->outmaps[vertex_id(J)].contains(j);
  const auto& d = std::get<Derived>(rep_);
  const std::size_t e = J.elements[partition_.block_of(j)];
  if (d.image[j] != d.image[e]) {
    Vertex projected;
    projected.elements.resize(block_count());
    for (std::size_t i = 0; i < block_count(); ++i) projected.elements[i] = d.image[J.elements[i]];
    return d.base->outgoing(projected, d.image[j]);
  }
  return d.rank[j] < d.rank[e];
}

ConstraintSet GridUso::outmap(const Vertex& J) const {
  if (const auto* dense = std::get_if<Dense>(&rep_)) return dense->outmaps[vertex_id(J)];
  ConstraintSet out(size());
  const ConstraintSet own = J.as_set(size());
  for (std::size_t j = 0; j < size(); ++j) {
    if (!own.contains(j) && outgoing(J, j)) out.insert(j);
  }
  return out;
}

Vertex GridUso::neighbour(const Vertex& J, std::size_t j) const {
  Vertex K = J;
  K.elements.at(partition_.block_of(j)) = j;
  return K;
}

Vertex GridUso::sink(const ConstraintSet& G) const {
  if (G.universe() != size()) throw ContractViolation("sink query from a different ground set");
  if (!partition_.is_valid(G)) throw ContractViolation("sink of a set that misses a block");
  if (const auto* dense = std::get_if<Dense>(&rep_)) {
    std::optional<Vertex> found;
    for_each_subgrid_vertex(partition_, G, [&](const Vertex& J) {
      if (!dense->outmaps[vertex_id(J)].intersects(G)) {
        found = J;
        return false;
      }
      return true;
    });
    if (!found) throw InvalidInstance("subgrid without a sink; orientation is not a USO");
    return *found;
  }
  const auto& d = std::get<Derived>(rep_);
  ConstraintSet projected(d.base->size());
  G.for_each([&](ConstraintSet::Index h) { projected.insert(d.image[h]); });
  const Vertex base_sink = d.base->sink(projected);
  Vertex J;
  J.elements.assign(block_count(), std::numeric_limits<std::size_t>::max());
  G.for_each([&](ConstraintSet::Index h) {
    const std::size_t i = partition_.block_of(h);
    if (d.image[h] != base_sink.elements[i]) return;
    std::size_t& cur = J.elements[i];
    if (cur == std::numeric_limits<std::size_t>::max() || d.rank[h] < d.rank[cur]) cur = h;
  });
  return J;
}

Vertex GridUso::sink_by_scan(const ConstraintSet& G, std::uint64_t& evals) const {
  if (G.universe() != size()) throw ContractViolation("sink query from a different ground set");
  if (!partition_.is_valid(G)) throw ContractViolation("sink of a set that misses a block");
  std::optional<Vertex> found;
  for_each_subgrid_vertex(partition_, G, [&](const Vertex& J) {
    const ConstraintSet own = J.as_set(size());
    bool is_sink = true;
    (G - own).for_each([&](ConstraintSet::Index j) {
      if (!is_sink) return;
      ++evals;
      if (outgoing(J, j)) is_sink = false;
    });
    if (is_sink) found = J;
    return !is_sink;
  });
  if (!found) throw InvalidInstance("subgrid without a sink; orientation is not a USO");
  return *found;
}

Vertex GridUso::global_sink() const { return sink(ConstraintSet::full(size())); }

GridUso GridUso::materialize() const {
  const std::uint64_t count = partition_.vertex_count();
  if (count > kMaxMaterialize) throw SizeGuard("grid too large to store one outmap per vertex");
  std::vector<ConstraintSet> out(count);
  for (std::uint64_t id = 0; id < count; ++id) out[id] = outmap(vertex_at(id));
  return GridUso(partition_, std::move(out));
}

void GridUso::check_edges() const {
  const auto& out = std::get<Dense>(rep_).outmaps;
  for (std::uint64_t id = 0; id < out.size(); ++id) {
    const Vertex J = vertex_at(id);
    const ConstraintSet own = J.as_set(size());
    if (out[id].universe() != size()) throw InvalidInstance("outmap of " + vertex_text(J) + " has the wrong universe");
    if (out[id].intersects(own)) throw InvalidInstance("outmap of " + vertex_text(J) + " contains its own element");
    for (std::size_t j = 0; j < size(); ++j) {
      if (own.contains(j)) continue;
      const std::size_t back = J.elements[partition_.block_of(j)];
      const bool forward = out[id].contains(j);
      const bool backward = out[vertex_id(neighbour(J, j))].contains(back);
      if (forward == backward) {
        throw InvalidInstance("edge between " + vertex_text(J) + " and " + vertex_text(neighbour(J, j)) +
                              (forward ? " is oriented both ways" : " is not oriented"));
      }
    }
  }
}

namespace detail {

VertexTable vertex_table(const GridUso& u) {
  if (u.size() > kMaxValidateSize) throw SizeGuard("grid larger than 16 elements");
  const std::uint64_t count = u.partition().vertex_count();
  VertexTable t;
  t.vertex.resize(count);
  t.out.resize(count);
  for (std::uint64_t id = 0; id < count; ++id) {
    const Vertex J = u.vertex_at(id);
    t.vertex[id] = static_cast<Mask>(J.as_set(u.size()).to_mask());
    t.out[id] = static_cast<Mask>(u.outmap(J).to_mask());
  }
  return t;
}

std::size_t count_sinks(const VertexTable& table, Mask G) {
  std::size_t sinks = 0;
  for (std::size_t id = 0; id < table.vertex.size(); ++id) {
    if ((table.vertex[id] & ~G) == 0 && (table.out[id] & G) == 0) ++sinks;
  }
  return sinks;
}

bool is_valid_mask(const GridPartition& partition, Mask G) {
  for (const auto& b : partition.blocks()) {
    bool hit = false;
    for (auto h : b) hit = hit || ((G >> h) & 1u);
    if (!hit) return false;
  }
  return true;
}

}  // namespace detail

std::optional<SubgridWitness> validate_uso(const GridUso& u) {
  const auto table = detail::vertex_table(u);
  const std::size_t n = u.size();
  const auto total = static_cast<std::int64_t>(std::uint64_t{1} << n);
  std::int64_t best = total;
#pragma omp parallel for schedule(dynamic, 64) reduction(min : best)
  for (std::int64_t g = 1; g < total; ++g) {
    const auto G = static_cast<Mask>(g);
    if (!detail::is_valid_mask(u.partition(), G)) continue;
    if (detail::count_sinks(table, G) != 1 && g < best) best = g;
  }
  if (best == total) return std::nullopt;
  const auto G = static_cast<Mask>(best);
  return SubgridWitness{ConstraintSet::from_mask(n, G), detail::count_sinks(table, G)};
}

GridUso coordinate_order_uso(const GridPartition& partition, const std::vector<std::vector<std::size_t>>& ranking) {
  const std::size_t k = partition.block_count();
  if (ranking.size() != k) throw InvalidInstance("one ranking per block required");
  std::vector<std::size_t> rank(partition.size());
  std::vector<std::size_t> image(partition.size());
  for (std::size_t i = 0; i < k; ++i) {
    auto sorted = ranking[i];
    std::sort(sorted.begin(), sorted.end());
    if (sorted != partition.block(i)) throw InvalidInstance("ranking of block " + std::to_string(i) + " is not a permutation of it");
    for (std::size_t p = 0; p < ranking[i].size(); ++p) {
      rank[ranking[i][p]] = p;
      image[ranking[i][p]] = i;
    }
  }
  auto base = std::make_shared<const GridUso>(GridPartition::consecutive(std::vector<std::size_t>(k, 1)),
                                              std::vector<ConstraintSet>{ConstraintSet(k)});
  return GridUso(partition, std::move(base), std::move(image), std::move(rank));
}

GridUso random_coordinate_order_uso(const GridPartition& partition, Rng& rng) {
  auto ranking = partition.blocks();
  for (auto& r : ranking) rng.shuffle(r);
  return coordinate_order_uso(partition, ranking);
}

GridUso cyclic_cube_uso() {
  // Outmaps indexed by (x0, x1, x2), id = x0 + 2 x1 + 4 x2; element 2i + x is
  // value x in block i. Found by exhaustive search over 2x2x2 USOs.
  const std::vector<std::vector<std::pair<int, int>>> table = {
      {},                        // 000
      {{0, 0}, {1, 1}},          // 100
      {{1, 0}, {2, 1}},          // 010
      {{0, 0}},                  // 110
      {{0, 1}, {2, 0}},          // 001
      {{2, 0}},                  // 101
      {{1, 0}},                  // 011
      {{0, 0}, {1, 0}, {2, 0}},  // 111
  };
  std::vector<ConstraintSet> out;
  for (const auto& dirs : table) {
    ConstraintSet s(6);
    for (auto [block, value] : dirs) s.insert(static_cast<std::size_t>(2 * block + value));
    out.push_back(s);
  }
  return GridUso(GridPartition::consecutive({2, 2, 2}), std::move(out));
}

GridUso random_uso(const GridPartition& partition, Rng& rng, std::uint64_t max_attempts) {
  if (partition.size() > 12) throw SizeGuard("random_uso is limited to 12 elements");
  const std::uint64_t count = partition.vertex_count();
  // Reuse the id arithmetic of a placeholder orientation.
  const GridUso shape = coordinate_order_uso(partition, partition.blocks());
  for (std::uint64_t attempt = 0; attempt < max_attempts; ++attempt) {
    std::vector<ConstraintSet> out(count, ConstraintSet(partition.size()));
    for (std::uint64_t id = 0; id < count; ++id) {
      const Vertex J = shape.vertex_at(id);
      for (std::size_t i = 0; i < partition.block_count(); ++i) {
        const std::size_t mine = partition.position_of(J.elements[i]);
        for (std::size_t p = mine + 1; p < partition.block(i).size(); ++p) {
          const std::size_t j = partition.block(i)[p];
          if (rng.next() & 1) {
            out[id].insert(j);
          } else {
            out[shape.vertex_id(shape.neighbour(J, j))].insert(J.elements[i]);
          }
        }
      }
    }
    GridUso candidate(partition, std::move(out));
    if (!validate_uso(candidate)) return candidate;
  }
  throw GenerationExhausted("no USO found in " + std::to_string(max_attempts) + " attempts");
}

GridUso inflate_uso(std::shared_ptr<const GridUso> base, const GridPartition& partition, Rng& rng) {
  const std::size_t k = partition.block_count();
  if (!base || base->block_count() != k) throw InvalidInstance("base grid needs the same number of blocks");
  std::vector<std::size_t> image(partition.size());
  for (std::size_t i = 0; i < k; ++i) {
    const auto& targets = base->partition().block(i);
    auto members = partition.block(i);
    if (members.size() < targets.size()) throw InvalidInstance("block " + std::to_string(i) + " smaller than its base block");
    rng.shuffle(members);
    for (std::size_t p = 0; p < members.size(); ++p) {
      image[members[p]] = p < targets.size() ? targets[p] : targets[rng.below(targets.size())];
    }
  }
  std::vector<std::size_t> rank(partition.size());
  std::iota(rank.begin(), rank.end(), 0);
  rng.shuffle(rank);
  return GridUso(partition, std::move(base), std::move(image), std::move(rank));
}

std::optional<std::vector<Vertex>> find_directed_cycle(const GridUso& u) {
  const std::uint64_t count = u.partition().vertex_count();
  if (count > kMaxMaterialize) throw SizeGuard("grid too large for cycle search");
  std::vector<std::vector<std::uint64_t>> arcs(count);
  for (std::uint64_t id = 0; id < count; ++id) {
    const Vertex J = u.vertex_at(id);
    u.outmap(J).for_each([&](ConstraintSet::Index j) { arcs[id].push_back(u.vertex_id(u.neighbour(J, j))); });
  }
  enum : char { white, grey, black };
  std::vector<char> color(count, white);
  for (std::uint64_t root = 0; root < count; ++root) {
    if (color[root] != white) continue;
    std::vector<std::pair<std::uint64_t, std::size_t>> stack{{root, 0}};
    color[root] = grey;
    while (!stack.empty()) {
      auto& [v, next] = stack.back();
      if (next == arcs[v].size()) {
        color[v] = black;
        stack.pop_back();
        continue;
      }
      const std::uint64_t w = arcs[v][next++];
      if (color[w] == grey) {
        std::vector<Vertex> cycle;
        auto it = std::find_if(stack.begin(), stack.end(), [&](const auto& e) { return e.first == w; });
        for (; it != stack.end(); ++it) cycle.push_back(u.vertex_at(it->first));
        return cycle;
      }
      if (color[w] == white) {
        color[w] = grey;
        stack.emplace_back(w, 0);
      }
    }
  }
  return std::nullopt;
}

ConstraintSet uso_violators(const GridUso& u, const ConstraintSet& G) {
  if (G.universe() != u.size()) throw ContractViolation("violator query from a different ground set");
  if (!u.partition().is_valid(G)) return u.partition().missing_blocks(G);
  return u.outmap(u.sink(G));
}

UsoOracle::UsoOracle(std::shared_ptr<const GridUso> uso, std::optional<std::size_t> delta)
    : ViolationOracle(uso ? uso->size() : 0, delta.value_or(uso ? uso->block_count() : 1)), uso_(std::move(uso)) {
  if (!uso_) throw InvalidInstance("oracle needs an orientation");
}

ConstraintSet UsoOracle::violator_set(const ConstraintSet& G) const { return uso_violators(*uso_, G); }

bool UsoOracle::test_violation(const ConstraintSet& G, ConstraintSet::Index h) const {
  const GridPartition& p = uso_->partition();
  if (!p.is_valid(G)) {
    const auto& block = p.block(p.block_of(h));
    return std::none_of(block.begin(), block.end(), [&](std::size_t e) { return G.contains(e); });
  }
  if (p.is_vertex(G)) {
    edges_.fetch_add(1, std::memory_order_relaxed);
    return uso_->outgoing(p.vertex_of(G), h);
  }
  std::uint64_t evals = 1;
  const Vertex J = uso_->sink_by_scan(G, evals);
  edges_.fetch_add(evals, std::memory_order_relaxed);
  return uso_->outgoing(J, h);
}

}  // namespace vs
