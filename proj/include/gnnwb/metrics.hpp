#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "gnnwb/graph.hpp"
#include "gnnwb/partition.hpp"
#include "gnnwb/sampler.hpp"

namespace gnnwb {

struct Summary {
  double mean = 0.0;
  double variance = 0.0;  // population variance
  double imbalance = 1.0;  // max / mean; 1 when the mean is 0
};

/// Throws InputError on an empty list.
Summary summarize(std::span<const double> values);

/// Undirected edges whose endpoints sit in different partitions. For a
/// directed graph every cross-partition pair {u, v} with at least one slot
/// counts once.
std::uint64_t edge_cut(const Graph& g, const PartitionPlan& plan);

/// Sampling and aggregation work per partition over one epoch.
///
/// A sampled edge whose source u lives on partition(u) is a request served by
/// partition(u): local when that is the batch owner, remote otherwise (and then
/// charged to the serving partition). Aggregations are the sampled edges of the
/// batches each partition trains.
struct LoadReport {
  struct Row {
    std::uint64_t sampled_vertices = 0;
    std::uint64_t sampled_edges = 0;
    std::uint64_t local_sample_requests = 0;
    std::uint64_t remote_sample_requests = 0;

    std::uint64_t workload() const { return local_sample_requests + remote_sample_requests + sampled_edges; }
  };
  std::vector<Row> partitions;
  Row total;
  double imbalance = 1.0;  // max/mean of Row::workload
};

LoadReport comp_load(const Graph& g, const PartitionPlan& plan, std::span<const SampledSubgraph> epoch);

/// Remote data each partition sends over one epoch. Per batch, every distinct
/// frontier vertex not resident on the batch owner (neither owned nor in its
/// cache set) is sent once by its owner. Sampled edges whose dst is not
/// resident are charged to the dst owner as subgraph edges.
struct CommReport {
  struct Row {
    std::uint64_t sent_vertices = 0;
    std::uint64_t sent_feature_bytes = 0;
    std::uint64_t sent_subgraph_edges = 0;
  };
  std::size_t feature_dim = 0;
  std::vector<Row> partitions;
  Row total;
  double imbalance = 1.0;  // max/mean of sent_feature_bytes
};

CommReport comm_load(const Graph& g, const PartitionPlan& plan, std::span<const SampledSubgraph> epoch,
                     std::size_t feature_dim);

struct ClusteringStats {
  // Coefficients per set, in the order of each set's (sorted) members.
  std::vector<std::vector<double>> per_vertex;
  std::vector<double> set_means;
  double mean = 0.0;      // mean over set means
  double variance = 0.0;  // population variance over set means
};

/// Local clustering coefficients within the subgraph induced by each set.
/// Sets need not be sorted; duplicates are removed.
ClusteringStats clustering_stats(const Graph& g, std::span<const std::vector<VertexId>> sets);

/// Local clustering coefficients of each batch's sampled subgraph: the input
/// frontier joined by the sampled edges of every layer, taken as undirected.
/// Coefficients follow frontier order.
ClusteringStats subgraph_clustering_stats(std::span<const SampledSubgraph> epoch);

/// CSV columns: partition,sampled_vertices,sampled_edges,local_sample_requests,
/// remote_sample_requests,workload; then "total" and "imbalance" rows.
void write_load_csv(std::ostream& out, const LoadReport& r);
/// CSV columns: partition,sent_vertices,sent_feature_bytes,sent_subgraph_edges;
/// then "total" and "imbalance" rows.
void write_comm_csv(std::ostream& out, const CommReport& r);

}  // namespace gnnwb
