#include "gnnwb/kernels.hpp"

#include <algorithm>
#include <string>

#include "gnnwb/error.hpp"

namespace gnnwb::kernels {

std::vector<SampledSubgraph> sample_epoch(const Graph& g, const BatchSchedule& schedule,
                                          const SamplerConfig& config, std::uint64_t seed, std::uint64_t epoch) {
  config.validate();
  // Exceptions must not escape an OpenMP region, so inputs are checked up front.
  for (const auto& batch : schedule.batches)
    for (VertexId v : batch)
      if (v >= g.num_vertices()) throw InputError("batch vertex " + std::to_string(v) + " out of range");
  const auto count = static_cast<std::ptrdiff_t>(schedule.size());
  std::vector<SampledSubgraph> out(schedule.size());
  // Batches are independent and each draws from its own key, so the schedule
  // and thread count cannot change the result.
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const auto b = static_cast<std::size_t>(i);
    out[b] = sample_subgraph(g, schedule.batches[b], config, SampleKey{seed, epoch, b});
    out[b].owner = schedule.owners.empty() ? 0 : schedule.owners[b];
  }
  return out;
}

std::vector<double> local_clustering(const Graph& g, std::span<const VertexId> members) {
  std::vector<char> in_set(g.num_vertices(), 0);
  for (VertexId v : members) in_set[v] = 1;

  // Induced adjacency, kept sorted because the CSR rows are.
  std::vector<std::size_t> offsets(members.size() + 1, 0);
  std::vector<VertexId> adj;
  for (std::size_t i = 0; i < members.size(); ++i) {
    for (VertexId u : g.neighbors(members[i]))
      if (in_set[u]) adj.push_back(u);
    offsets[i + 1] = adj.size();
  }
  auto row = [&](VertexId v) {
    const auto i = static_cast<std::size_t>(std::lower_bound(members.begin(), members.end(), v) - members.begin());
    return std::span<const VertexId>(adj.data() + offsets[i], offsets[i + 1] - offsets[i]);
  };

  std::vector<double> cc(members.size(), 0.0);
  const auto count = static_cast<std::ptrdiff_t>(members.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const auto nv = row(members[static_cast<std::size_t>(i)]);
    const std::size_t d = nv.size();
    if (d < 2) continue;
    std::size_t links = 0;
    for (std::size_t j = 0; j < d; ++j) {
      // Pairs (a, b) with a < b and b in N(a): merge N(a) against the tail of N(v).
      const auto na = row(nv[j]);
      auto p = std::upper_bound(na.begin(), na.end(), nv[j]);
      auto q = nv.begin() + static_cast<std::ptrdiff_t>(j) + 1;
      while (p != na.end() && q != nv.end()) {
        if (*p < *q) ++p;
        else if (*q < *p) ++q;
        else {
          ++links;
          ++p;
          ++q;
        }
      }
    }
    cc[static_cast<std::size_t>(i)] = 2.0 * static_cast<double>(links) / (static_cast<double>(d) * (d - 1));
  }
  return cc;
}

std::vector<std::uint64_t> access_counts(std::span<const SampledSubgraph> epoch, std::size_t num_vertices) {
  for (const auto& sg : epoch)
    for (VertexId v : sg.input_frontier)
      if (v >= num_vertices) throw InputError("frontier vertex out of range");
  std::vector<std::uint64_t> counts(num_vertices, 0);
  std::uint64_t* c = counts.data();
  const auto count = static_cast<std::ptrdiff_t>(epoch.size());
  // Per-thread private arrays merged at the end; atomics cost more than the work.
#pragma omp parallel for schedule(dynamic, 1) reduction(+ : c[:num_vertices])
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    for (VertexId v : epoch[static_cast<std::size_t>(i)].input_frontier) ++c[v];
  }
  return counts;
}

}  // namespace gnnwb::kernels
