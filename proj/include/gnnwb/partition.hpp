#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "gnnwb/graph.hpp"

namespace gnnwb {

using PartitionId = std::uint32_t;

enum class PartitionMethod { Hash, Multilevel, StreamVertex, StreamBlock };

std::string to_string(PartitionMethod m);

struct BalanceConstraints {
  bool balance_train = false;
  bool balance_degree = false;
  bool balance_val_test = false;
  double tolerance = 0.05;

  // Named presets for the constrained multilevel variants.
  static BalanceConstraints metis_v() { return {true, false, false}; }
  static BalanceConstraints metis_ve() { return {true, true, false}; }
  static BalanceConstraints metis_vet() { return {true, true, true}; }
};

enum class StreamMode { Vertex, Block };

struct StreamConfig {
  StreamMode mode = StreamMode::Vertex;
  std::size_t block_size = 64;
  std::size_t hop_cache_depth = 2;
  // Reserved slack added to the ideal per-partition train count before the
  // balance factor reaches zero.
  double balance_slack = 0.0;
};

struct PartitionCounts {
  std::size_t vertices = 0;
  std::size_t edges = 0;
  std::size_t train = 0;
  std::size_t val = 0;
  std::size_t test = 0;

  bool operator==(const PartitionCounts&) const = default;
};

/// Vertex -> partition assignment plus per-partition summaries.
struct PartitionPlan {
  PartitionMethod method = PartitionMethod::Hash;
  std::uint32_t k = 1;
  std::uint64_t seed = 0;
  BalanceConstraints constraints{};
  std::vector<PartitionId> assignment;
  std::vector<PartitionCounts> counts;
  // Optional per-partition resident vertex sets (sorted). Filled by vertex
  // streaming, which replicates each partition's L-hop training neighborhood.
  std::vector<std::vector<VertexId>> cache_sets;

  PartitionId owner(VertexId v) const { return assignment[v]; }
  bool has_cache() const { return !cache_sets.empty(); }
  bool is_resident(VertexId v, PartitionId p) const;
  std::vector<std::vector<VertexId>> members() const;
};

/// Recomputes per-partition counts. Edge slots are owned by the vertex whose
/// adjacency row stores them.
std::vector<PartitionCounts> compute_counts(const Graph& g, const VertexMasks* masks,
                                            std::span<const PartitionId> assignment, std::uint32_t k);

/// Throws InputError when the assignment is incomplete or stored counts disagree.
void validate_plan(const Graph& g, const VertexMasks* masks, const PartitionPlan& plan);

/// Seeded shuffle followed by round-robin, so partition sizes differ by at most one.
PartitionPlan hash_partition(const Graph& g, std::uint32_t k, std::uint64_t seed,
                             const VertexMasks* masks = nullptr);

/// Round-robin on vertex ids without shuffling (v -> v mod k).
PartitionPlan round_robin_partition(const Graph& g, std::uint32_t k, const VertexMasks* masks = nullptr);

/// Multilevel edge-cut partitioning: heavy-edge matching coarsening, greedy
/// region growing on the coarsest graph, and boundary FM refinement under
/// multi-dimensional balance caps. Vertex counts are always balanced, capped
/// by balance_cap(); each enabled constraint dimension is capped at
/// floor((1 + tolerance) * ideal). Throws InfeasibleError when an enabled
/// constraint cannot be met.
PartitionPlan multilevel_partition(const Graph& g, std::uint32_t k, const VertexMasks* masks,
                                   const BalanceConstraints& constraints, std::uint64_t seed);

/// Per-partition vertex-count cap: floor((1 + tolerance) * ideal), raised to
/// ceil(ideal) when rounding would leave no feasible assignment.
double balance_cap(double total, std::uint32_t k, double tolerance);

/// Vertex streaming: train vertices in seeded order, each to the partition
/// maximising |N(v) ∩ assigned| times a linear train-balance factor. Every
/// other vertex is owned by the partition of its nearest train vertex, and
/// each partition caches the L-hop neighborhood of its train vertices.
PartitionPlan stream_vertex_partition(const Graph& g, const VertexMasks& masks, std::uint32_t k,
                                      const StreamConfig& config, std::uint64_t seed);

/// Block streaming: BFS blocks grown from train vertices (then from any
/// leftover vertex), each assigned to the partition with most edges into it,
/// scaled by a train/val/test balance factor.
PartitionPlan stream_block_partition(const Graph& g, const VertexMasks& masks, std::uint32_t k,
                                     const StreamConfig& config, std::uint64_t seed);

/// The seeded train-vertex order shared by both streaming partitioners.
std::vector<VertexId> streaming_order(const VertexMasks& masks, std::uint64_t seed);

/// Plan file: '#'-prefixed header lines (method, k, seed, constraint flags)
/// followed by one partition id per vertex line.
void write_plan(std::ostream& out, const PartitionPlan& plan);
PartitionPlan read_plan(std::istream& in);

}  // namespace gnnwb
