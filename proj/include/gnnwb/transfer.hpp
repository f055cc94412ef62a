#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gnnwb/graph.hpp"
#include "gnnwb/sampler.hpp"

namespace gnnwb {

// ---------------------------------------------------------------------------
// Feature cache

enum class CachePolicy { DegreeBased, PreSampling };

std::string to_string(CachePolicy p);

struct CachePolicyConfig {
  CachePolicy policy = CachePolicy::DegreeBased;
  // Exactly one of the two capacity forms must be set.
  std::optional<std::size_t> capacity_vertices;
  std::optional<double> capacity_ratio;
  std::size_t presample_epochs = 1;
  // Batch size of the pre-sampling epochs (random batches).
  std::size_t presample_batch_size = 512;
  std::uint64_t seed = 0;

  void validate() const;
  /// Capacity in vertices, clamped to n. A ratio gives floor(ratio * n).
  std::size_t capacity(std::size_t num_vertices) const;
};

struct CacheAssignment {
  CachePolicy policy = CachePolicy::DegreeBased;
  std::size_t capacity = 0;
  std::vector<VertexId> vertices;  // sorted
  std::vector<char> resident;      // indexed by vertex id

  bool contains(VertexId v) const { return v < resident.size() && resident[v]; }
  std::size_t size() const { return vertices.size(); }
};

/// Cache that holds no vertex of an n-vertex graph.
CacheAssignment empty_cache(std::size_t num_vertices);

/// Top-capacity vertices by `score`, ties broken by `tiebreak` then lower id.
CacheAssignment cache_top(std::span<const double> score, std::span<const double> tiebreak, std::size_t capacity,
                          CachePolicy policy);

/// DegreeBased: highest degree first, ties to lower ids. PreSampling: runs
/// presample_epochs random-batch epochs with `sampler` over the train mask and
/// caches the most frequently accessed frontier vertices (ties by degree,
/// then id). The pre-sampling epochs use seeds derived from config.seed.
CacheAssignment build_cache(const Graph& g, const CachePolicyConfig& config, const SamplerConfig* sampler = nullptr,
                            const VertexMasks* masks = nullptr);

// ---------------------------------------------------------------------------
// Transfer volume

struct TransferModel {
  std::size_t feature_dim = 0;
  // Explicit transfer first gathers rows into a staging buffer. The gather is
  // charged as this fraction of the copied bytes.
  double gather_ratio = 0.74;

  std::uint64_t feature_bytes() const { return static_cast<std::uint64_t>(feature_dim) * 4; }
};

struct TransferRow {
  std::uint64_t requested_vertices = 0;
  std::uint64_t cache_hits = 0;
  std::uint64_t transferred_vertices = 0;
  double transferred_bytes_explicit = 0.0;
  std::uint64_t transferred_bytes_zerocopy = 0;
};

struct TransferReport {
  std::vector<TransferRow> batches;
  TransferRow total;
  double hit_rate = 0.0;  // total hits / total requested; 0 when nothing was requested
};

TransferReport simulate_transfer(std::span<const SampledSubgraph> epoch, const CacheAssignment& cache,
                                 const TransferModel& model);

// ---------------------------------------------------------------------------
// Block activity

struct BlockActivityReport {
  std::size_t block_bytes = 256 * 1024;
  std::size_t vertices_per_block = 0;
  std::vector<double> thresholds;
  // Blocks touched by at least one frontier vertex, summed over batches.
  std::uint64_t touched_blocks = 0;
  // Fraction of touched blocks whose active ratio is >= each threshold,
  // before and after removing cached vertices from the frontiers. Both use
  // the pre-cache touched count as denominator.
  std::vector<double> eligible_before;
  std::vector<double> eligible_after;
};

/// Vertex v lives in block floor(v / vertices_per_block), where
/// vertices_per_block = floor(block_bytes / (4 * feature_dim)). Throws
/// InputError when a block cannot hold one vertex.
BlockActivityReport block_activity(std::span<const SampledSubgraph> epoch, std::size_t num_vertices,
                                   const CacheAssignment& cache, std::size_t feature_dim,
                                   std::size_t block_bytes, std::span<const double> thresholds);

// ---------------------------------------------------------------------------
// Pipeline

struct StageCosts {
  double bp = 0.0;  // batch preparation
  double dt = 0.0;  // data transfer
  double nn = 0.0;  // NN computation

  double total() const { return bp + dt + nn; }
};

enum class PipelineMode { Sequential, Pipelined };

std::string to_string(PipelineMode m);

struct PipelineTimeline {
  PipelineMode mode = PipelineMode::Sequential;
  std::vector<StageCosts> costs;
  // start[b][s] / finish[b][s] for stage s in (BP, DT, NN).
  std::vector<std::array<double, 3>> start;
  std::vector<std::array<double, 3>> finish;
  double makespan = 0.0;
  std::array<double, 3> busy_fraction{};  // stage busy time / makespan
};

/// Sequential runs each batch's three stages back to back. Pipelined lets
/// stage s of batch b start at max(finish(s, b-1), finish(s-1, b)). Throws
/// InputError for an empty list or a negative cost.
PipelineTimeline simulate_pipeline(std::span<const StageCosts> costs, PipelineMode mode);

/// Linear stage cost model in abstract time units.
struct CostModel {
  double bp_per_sampled_edge = 1.0;
  double bp_per_sampled_vertex = 0.0;
  double dt_per_byte = 0.0125;
  double nn_per_aggregation = 1.0;

  void validate() const;
};

/// BP = edges * bp_per_sampled_edge + vertices * bp_per_sampled_vertex;
/// DT = transferred_bytes * dt_per_byte; NN = edges * nn_per_aggregation.
StageCosts estimate_stage_costs(const SampledSubgraph& sg, double transferred_bytes, const CostModel& model);

// CSV writers (column names are stable).
void write_transfer_csv(std::ostream& out, const TransferReport& r);
void write_block_activity_csv(std::ostream& out, const BlockActivityReport& r);
void write_pipeline_csv(std::ostream& out, const PipelineTimeline& t);

}  // namespace gnnwb
