#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gnnwb/graph.hpp"
#include "gnnwb/partition.hpp"

namespace gnnwb {

enum class BatchPolicy { Random, ClusterBased };

/// One epoch's worth of batches. Together the batches partition the train set;
/// only the last batch of each owner may be short.
struct BatchSchedule {
  BatchPolicy policy = BatchPolicy::Random;
  std::size_t batch_size = 0;
  std::uint64_t seed = 0;
  std::vector<std::vector<VertexId>> batches;
  // Partition that trains each batch (all zero for single-worker schedules).
  std::vector<PartitionId> owners;

  std::size_t size() const { return batches.size(); }
};

/// Random: seeded shuffle, then consecutive chunks. ClusterBased: clusters are
/// visited in seeded order and their train vertices concatenated (shuffled
/// within each cluster) before chunking, so a batch only spills into the next
/// cluster to fill up. Needs at least ceil(|train| / batch_size) clusters.
BatchSchedule select_batches(std::span<const VertexId> train, std::size_t batch_size, BatchPolicy policy,
                             const PartitionPlan* clusters, std::uint64_t seed);

BatchSchedule select_batches(const VertexMasks& masks, std::size_t batch_size, BatchPolicy policy,
                             const PartitionPlan* clusters, std::uint64_t seed);

/// Cluster-based selection without a precomputed plan: clusters the graph with
/// unconstrained multilevel partitioning into ceil(|train| / batch_size) parts.
BatchSchedule select_cluster_batches(const Graph& g, std::span<const VertexId> train, std::size_t batch_size,
                                     std::uint64_t seed);

/// Per-worker schedules: each partition batches its own train vertices and
/// owns the resulting batches. Cluster-based selection reuses `clusters`.
BatchSchedule select_partitioned_batches(const PartitionPlan& plan, const VertexMasks& masks,
                                         std::size_t batch_size, BatchPolicy policy,
                                         const PartitionPlan* clusters, std::uint64_t seed);

struct AdaptiveBatchState {
  std::size_t current_batch_size = 512;
  std::size_t max_batch_size = 8192;
  double growth_factor = 2.0;
  std::size_t patience = 3;
  double best_val_acc = 0.0;
  std::size_t epochs_since_improve = 0;
};

/// Plateau-driven growth: an epoch improves when val_acc > best + 1e-4;
/// after `patience` epochs without improvement the batch size grows by
/// growth_factor (capped at max) and the counter resets.
AdaptiveBatchState next_batch_size(AdaptiveBatchState state, double val_acc);

}  // namespace gnnwb
