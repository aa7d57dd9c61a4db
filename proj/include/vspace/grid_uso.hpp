#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "vspace/constraint_set.hpp"
#include "vspace/oracle.hpp"
#include "vspace/rng.hpp"

namespace vs {

/// One element per block, indexed by block.
struct Vertex {
  std::vector<std::size_t> elements;

  ConstraintSet as_set(std::size_t universe) const { return ConstraintSet(universe, elements); }
  friend bool operator==(const Vertex&, const Vertex&) = default;
};

/// Partition of H = {0..n-1} into nonempty blocks.
class GridPartition {
 public:
  GridPartition() = default;
  explicit GridPartition(std::vector<std::vector<std::size_t>> blocks);

  /// Blocks of the given sizes over consecutive indices: {0..s0-1}, {s0..}, ...
  static GridPartition consecutive(const std::vector<std::size_t>& sizes);

  std::size_t size() const { return block_of_.size(); }
  std::size_t block_count() const { return blocks_.size(); }
  const std::vector<std::vector<std::size_t>>& blocks() const { return blocks_; }
  const std::vector<std::size_t>& block(std::size_t i) const { return blocks_[i]; }
  std::size_t block_of(std::size_t h) const { return block_of_[h]; }
  std::size_t position_of(std::size_t h) const { return position_[h]; }
  ConstraintSet block_set(std::size_t i) const;

  /// G meets every block.
  bool is_valid(const ConstraintSet& G) const;
  /// G has exactly one element per block.
  bool is_vertex(const ConstraintSet& G) const;
  /// The vertex J with J as a set equal to G; G must be a vertex.
  Vertex vertex_of(const ConstraintSet& G) const;
  /// Union of the blocks disjoint from G.
  ConstraintSet missing_blocks(const ConstraintSet& G) const;

  std::uint64_t vertex_count() const;

  friend bool operator==(const GridPartition&, const GridPartition&) = default;

 private:
  std::vector<std::vector<std::size_t>> blocks_;
  std::vector<std::size_t> block_of_;
  std::vector<std::size_t> position_;
};

/// Orientation of the grid spanned by a partition. Either stored densely as
/// an outmap per vertex, or derived from a smaller base orientation by
/// mapping every element to a base element of the same block and ordering
/// elements that share an image by rank (coordinate-order USOs are the case
/// of a base with singleton blocks).
class GridUso {
 public:
  /// Dense outmap indexed by vertex id. Throws InvalidInstance when an outmap
  /// leaves the ground set, contains its own vertex, or an edge is oriented
  /// both ways or neither way.
  GridUso(GridPartition partition, std::vector<ConstraintSet> outmaps);

  /// Derived orientation, see class comment. `image[h]` is an element of the
  /// base grid lying in base block block_of(h); `rank[h]` orders elements
  /// with a common image (smaller is better).
  GridUso(GridPartition partition, std::shared_ptr<const GridUso> base, std::vector<std::size_t> image,
          std::vector<std::size_t> rank);

  const GridPartition& partition() const { return partition_; }
  std::size_t size() const { return partition_.size(); }
  std::size_t block_count() const { return partition_.block_count(); }
  bool is_dense() const { return std::holds_alternative<Dense>(rep_); }

  std::uint64_t vertex_id(const Vertex& J) const;
  Vertex vertex_at(std::uint64_t id) const;

  /// Edge evaluation: does the edge between J and J > j leave J? (j not in J)
  bool outgoing(const Vertex& J, std::size_t j) const;
  /// The outmap s(J).
  ConstraintSet outmap(const Vertex& J) const;

  /// Neighbour of J in direction j.
  Vertex neighbour(const Vertex& J, std::size_t j) const;

  /// Sink of the subgrid spanned by a valid G. Dense orientations scan the
  /// subgrid; derived ones project G to the base and pick the best-ranked
  /// preimage of the base sink in every block.
  Vertex sink(const ConstraintSet& G) const;
  /// Sink by exhaustive scan of the subgrid's vertices; adds one to `evals`
  /// per edge evaluation made.
  Vertex sink_by_scan(const ConstraintSet& G, std::uint64_t& evals) const;
  Vertex global_sink() const;

  GridUso materialize() const;

 private:
  struct Dense {
    std::vector<ConstraintSet> outmaps;
  };
  struct Derived {
    std::shared_ptr<const GridUso> base;
    std::vector<std::size_t> image;
    std::vector<std::size_t> rank;
  };

  void check_edges() const;

  GridPartition partition_;
  std::variant<Dense, Derived> rep_;
};

/// Subgrid spanned by G with `sinks` != 1 sinks.
struct SubgridWitness {
  ConstraintSet G;
  std::size_t sinks;
};

inline constexpr std::size_t kMaxValidateSize = 16;

namespace detail {
/// Every vertex of a small grid as a mask, with its outmap as a mask.
struct VertexTable {
  std::vector<Mask> vertex;
  std::vector<Mask> out;
};
VertexTable vertex_table(const GridUso& u);
/// Vertices J inside G with s(J) disjoint from G.
std::size_t count_sinks(const VertexTable& table, Mask G);
bool is_valid_mask(const GridPartition& partition, Mask G);
}  // namespace detail

/// Checks that every nonempty subgrid has exactly one sink. OpenMP-parallel;
/// returns the canonical witness (smallest G mask). Throws SizeGuard above n = 16.
std::optional<SubgridWitness> validate_uso(const GridUso& u);

/// Orientation with J -> J > j iff j ranks before J's element of j's block.
/// `ranking[i]` lists block i's elements best first.
GridUso coordinate_order_uso(const GridPartition& partition,
                             const std::vector<std::vector<std::size_t>>& ranking);

/// Coordinate-order USO with every block ranked uniformly at random.
GridUso random_coordinate_order_uso(const GridPartition& partition, Rng& rng);

/// Fixed 2x2x2 USO with a directed 6-cycle. Blocks {0,1}, {2,3}, {4,5}.
GridUso cyclic_cube_uso();

/// Uniformly random edge orientation, resampled until it is a USO. n <= 12.
GridUso random_uso(const GridPartition& partition, Rng& rng, std::uint64_t max_attempts = 1'000'000);

/// Blows a small USO up to a large one: every element of `partition` is
/// assigned a uniformly random base element of its block (each base element
/// used at least once) and a random rank. The result is a USO that contains
/// every directed cycle of the base.
GridUso inflate_uso(std::shared_ptr<const GridUso> base, const GridPartition& partition, Rng& rng);

/// Directed cycle in the vertex digraph (arcs J -> J > j per outmap member),
/// as a vertex sequence without repetition of the start.
std::optional<std::vector<Vertex>> find_directed_cycle(const GridUso& u);

/// V(G): s(sink(G)) if G meets every block, otherwise the union of blocks G misses.
ConstraintSet uso_violators(const GridUso& u, const ConstraintSet& G);

/// Oracle of the grid violator space, delta = number of blocks. Every
/// violation test (violates and peek) counts edge evaluations: none for sets
/// missing a block, one for a vertex, and for any other valid G one per edge
/// evaluated by the sink scan plus one for the final answer. violator_set is free.
class UsoOracle final : public ViolationOracle {
 public:
  explicit UsoOracle(std::shared_ptr<const GridUso> uso, std::optional<std::size_t> delta = std::nullopt);

  const GridUso& uso() const { return *uso_; }
  std::uint64_t edge_evaluations() const { return edges_.load(std::memory_order_relaxed); }

  ConstraintSet violator_set(const ConstraintSet& G) const override;
  std::optional<InternalCost> internal_cost() const override {
    return InternalCost{"edge_evaluations", edge_evaluations()};
  }

 protected:
  bool test_violation(const ConstraintSet& G, ConstraintSet::Index h) const override;

 private:
  std::shared_ptr<const GridUso> uso_;
  mutable std::atomic<std::uint64_t> edges_{0};
};

}  // namespace vs
