#pragma once

// Data-parallel hot loops. `kernels` holds the OpenMP versions used by the
// workbench; `reference` holds plain serial versions with the same contracts,
// kept for differential tests and the benchmark.

#include <cstdint>
#include <span>
#include <vector>

#include "gnnwb/batch.hpp"
#include "gnnwb/graph.hpp"
#include "gnnwb/sampler.hpp"

namespace gnnwb {

namespace kernels {

/// Samples every batch of a schedule. Batch i uses SampleKey{seed, epoch, i}.
std::vector<SampledSubgraph> sample_epoch(const Graph& g, const BatchSchedule& schedule,
                                          const SamplerConfig& config, std::uint64_t seed, std::uint64_t epoch);

/// Local clustering coefficient of each member within the subgraph induced by
/// `members` (sorted, duplicate-free). Degree < 2 gives 0.
std::vector<double> local_clustering(const Graph& g, std::span<const VertexId> members);

/// How many batch frontiers each vertex appears in.
std::vector<std::uint64_t> access_counts(std::span<const SampledSubgraph> epoch, std::size_t num_vertices);

}  // namespace kernels

namespace reference {

std::vector<SampledSubgraph> sample_epoch(const Graph& g, const BatchSchedule& schedule,
                                          const SamplerConfig& config, std::uint64_t seed, std::uint64_t epoch);

// Pairwise adjacency tests on each member's induced neighbor list.
std::vector<double> local_clustering(const Graph& g, std::span<const VertexId> members);

std::vector<std::uint64_t> access_counts(std::span<const SampledSubgraph> epoch, std::size_t num_vertices);

}  // namespace reference

}  // namespace gnnwb
