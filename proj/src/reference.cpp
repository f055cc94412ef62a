#include <algorithm>
#include <set>

#include "gnnwb/error.hpp"
#include "gnnwb/kernels.hpp"

namespace gnnwb::reference {

std::vector<SampledSubgraph> sample_epoch(const Graph& g, const BatchSchedule& schedule,
                                          const SamplerConfig& config, std::uint64_t seed, std::uint64_t epoch) {
  config.validate();
  const double tau = config.method == SampleMethod::Hybrid ? config.resolved_threshold(g) : 0.0;
  std::vector<SampledSubgraph> out;
  for (std::size_t b = 0; b < schedule.size(); ++b) {
    const SampleKey key{seed, epoch, b};
    SampledSubgraph sg;
    sg.batch_index = b;
    sg.owner = schedule.owners.empty() ? 0 : schedule.owners[b];
    std::vector<VertexId> dst = schedule.batches[b];
    for (VertexId v : dst)
      if (v >= g.num_vertices()) throw InputError("batch vertex out of range");
    for (std::size_t l = 0; l < config.num_layers; ++l) {
      sg.layers.push_back(sample_layer(g, dst, l, config, key, tau));
      std::set<VertexId> next(dst.begin(), dst.end());
      next.insert(sg.layers.back().src.begin(), sg.layers.back().src.end());
      dst.assign(next.begin(), next.end());
    }
    std::set<VertexId> frontier(dst.begin(), dst.end());
    sg.input_frontier.assign(frontier.begin(), frontier.end());
    out.push_back(std::move(sg));
  }
  return out;
}

std::vector<double> local_clustering(const Graph& g, std::span<const VertexId> members) {
  const std::set<VertexId> in_set(members.begin(), members.end());
  std::vector<double> cc;
  for (VertexId v : members) {
    std::vector<VertexId> nv;
    for (VertexId u : g.neighbors(v))
      if (in_set.count(u)) nv.push_back(u);
    const std::size_t d = nv.size();
    if (d < 2) {
      cc.push_back(0.0);
      continue;
    }
    std::size_t links = 0;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = i + 1; j < d; ++j)
        if (g.has_edge(nv[j], nv[i])) ++links;
    cc.push_back(static_cast<double>(links) / (static_cast<double>(d) * (d - 1) / 2.0));
  }
  return cc;
}

std::vector<std::uint64_t> access_counts(std::span<const SampledSubgraph> epoch, std::size_t num_vertices) {
  std::vector<std::uint64_t> counts(num_vertices, 0);
  for (const auto& sg : epoch) {
    for (VertexId v : sg.input_frontier) {
      if (v >= num_vertices) throw InputError("frontier vertex out of range");
      ++counts[v];
    }
  }
  return counts;
}

}  // namespace gnnwb::reference
