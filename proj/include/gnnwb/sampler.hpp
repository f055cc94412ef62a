#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "gnnwb/graph.hpp"
#include "gnnwb/partition.hpp"

namespace gnnwb {

enum class SampleMethod { Fanout, Rate, Hybrid };

struct SamplerConfig {
  SampleMethod method = SampleMethod::Fanout;
  std::vector<std::size_t> fanouts{25, 10};
  std::vector<double> rates;
  // Hybrid degree threshold; unset means the graph's mean degree.
  std::optional<double> degree_threshold;
  std::size_t num_layers = 2;

  void validate() const;
  double resolved_threshold(const Graph& g) const;
};

/// Number of neighbors drawn for a vertex of the given degree at `layer`.
/// Fanout: min(fanout, deg). Rate: max(1, ceil(rate * deg)) for deg >= 1.
/// Hybrid: fanout rule when deg <= tau, rate rule otherwise.
std::size_t sample_count(const SamplerConfig& config, std::size_t layer, std::size_t degree, double tau);

/// Identifies one batch's random streams. Each (seed, epoch, batch, layer,
/// vertex) tuple gets its own generator, so results do not depend on
/// iteration order or thread count.
struct SampleKey {
  std::uint64_t seed = 0;
  std::uint64_t epoch = 0;
  std::uint64_t batch = 0;
};

/// One sampling hop: for every dst, the sampled source ids (sorted).
struct LayerBlock {
  std::vector<VertexId> dst;
  std::vector<std::size_t> offsets{0};
  std::vector<VertexId> src;

  std::size_t num_edges() const { return src.size(); }
  std::span<const VertexId> sampled(std::size_t i) const {
    return {src.data() + offsets[i], offsets[i + 1] - offsets[i]};
  }
};

/// L-hop sampled training subgraph of one batch. layers[0].dst is the batch;
/// layers[l+1].dst is the sorted union of layers[l]'s dst and sources; the
/// input frontier is that union for the last layer.
struct SampledSubgraph {
  std::uint64_t batch_index = 0;
  PartitionId owner = 0;
  std::vector<LayerBlock> layers;
  std::vector<VertexId> input_frontier;

  std::size_t sampled_vertices() const { return input_frontier.size(); }
  std::size_t sampled_edges() const;
  std::span<const VertexId> batch() const;
};

LayerBlock sample_layer(const Graph& g, std::span<const VertexId> dst, std::size_t layer,
                        const SamplerConfig& config, SampleKey key, double tau);

SampledSubgraph sample_subgraph(const Graph& g, std::span<const VertexId> batch, const SamplerConfig& config,
                                SampleKey key);

/// Text dump consumed by the transfer simulator:
///   gnnwb-subgraphs 1 <batches>
///   batch <index> <owner> <layers>
///   frontier <m> <ids...>            (sorted)
///   layer <l> <dst count> <edges>
///   <dst> <count> <srcs...>          (one line per dst)
void write_subgraph_dump(std::ostream& out, std::span<const SampledSubgraph> epoch);
std::vector<SampledSubgraph> read_subgraph_dump(std::istream& in);

}  // namespace gnnwb
