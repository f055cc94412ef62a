#pragma once

#include <random>
#include <string_view>
#include <vector>

#include "gnnwb/graph.hpp"
#include "gnnwb/partition.hpp"

namespace gnnwb::testing {

// Two triangles {0,1,2} and {3,4,5} joined by the edge 2-3.
inline Graph g6() {
  const std::vector<Edge> edges{{0, 1}, {0, 2}, {1, 2}, {2, 3}, {3, 4}, {3, 5}, {4, 5}};
  return Graph::from_edges(6, edges);
}

// One role character per vertex: T, V, E or N.
inline VertexMasks masks(std::string_view roles) {
  VertexMasks m;
  for (char c : roles) m.roles.push_back(role_from_char(c));
  return m;
}

inline PartitionPlan plan_from(const Graph& g, std::vector<PartitionId> assignment, std::uint32_t k,
                               const VertexMasks* m = nullptr) {
  PartitionPlan p;
  p.k = k;
  p.assignment = std::move(assignment);
  p.counts = compute_counts(g, m, p.assignment, k);
  return p;
}

inline Graph random_graph(std::size_t n, double p, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::bernoulli_distribution coin(p);
  std::vector<Edge> edges;
  for (VertexId u = 0; u < n; ++u)
    for (VertexId v = u + 1; v < n; ++v)
      if (coin(gen)) edges.push_back({u, v});
  return Graph::from_edges(n, edges);
}

inline Graph sbm(std::size_t n, std::size_t blocks, double intra, double inter, std::uint64_t seed,
                 std::size_t feature_dim = 8, double signal = 0.0) {
  GraphGenSpec s;
  s.num_vertices = n;
  s.block_count = blocks;
  s.intra_prob = intra;
  s.inter_prob = inter;
  s.feature_dim = feature_dim;
  s.num_classes = static_cast<int>(blocks);
  s.label_source = LabelSource::Block;
  s.feature_signal = signal;
  s.seed = seed;
  return generate_graph(s);
}

inline Graph powerlaw(std::size_t n, std::size_t m, std::uint64_t seed) {
  GraphGenSpec s;
  s.kind = GeneratorKind::PowerLaw;
  s.num_vertices = n;
  s.attach_degree = m;
  s.seed = seed;
  return generate_graph(s);
}

}  // namespace gnnwb::testing
