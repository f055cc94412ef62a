#include <algorithm>
#include <array>
#include <limits>
#include <string>

#include "gnnwb/error.hpp"
#include "gnnwb/partition.hpp"

namespace gnnwb {

namespace {

constexpr PartitionId kUnassigned = std::numeric_limits<PartitionId>::max();

void check_common(const Graph& g, const VertexMasks& masks, std::uint32_t k) {
  if (k < 1) throw InputError("k must be >= 1");
  if (k > g.num_vertices()) throw InputError("k exceeds vertex count");
  if (masks.size() != g.num_vertices()) throw InputError("mask size does not match graph");
}

// argmax score; ties go to the lower normalized load, then the lower index.
PartitionId pick(std::span<const double> score, std::span<const double> load) {
  PartitionId best = 0;
  for (PartitionId i = 1; i < score.size(); ++i) {
    if (score[i] > score[best] || (score[i] == score[best] && load[i] < load[best])) best = i;
  }
  return best;
}

// Level-synchronous multi-source BFS from already-owned vertices. A vertex
// first reached at distance d takes the lowest partition id among its
// distance-(d-1) neighbors. Unreachable vertices go to the smallest partition.
void own_by_nearest(const Graph& g, std::vector<PartitionId>& owner, std::uint32_t k) {
  constexpr std::size_t kFar = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> dist(owner.size(), kFar);
  std::vector<VertexId> frontier;
  for (std::size_t v = 0; v < owner.size(); ++v) {
    if (owner[v] != kUnassigned) {
      frontier.push_back(static_cast<VertexId>(v));
      dist[v] = 0;
    }
  }
  std::vector<VertexId> next;
  for (std::size_t d = 1; !frontier.empty(); ++d) {
    next.clear();
    for (VertexId u : frontier) {
      for (VertexId w : g.neighbors(u)) {
        if (owner[w] == kUnassigned) {
          next.push_back(w);
          owner[w] = owner[u];
          dist[w] = d;
        } else if (dist[w] == d) {
          owner[w] = std::min(owner[w], owner[u]);
        }
      }
    }
    frontier.swap(next);
  }
  std::vector<std::size_t> size(k, 0);
  for (auto p : owner)
    if (p != kUnassigned) ++size[p];
  for (auto& p : owner) {
    if (p != kUnassigned) continue;
    p = static_cast<PartitionId>(std::min_element(size.begin(), size.end()) - size.begin());
    ++size[p];
  }
}

std::vector<VertexId> hop_neighborhood(const Graph& g, std::span<const VertexId> sources, std::size_t hops,
                                       std::vector<std::uint32_t>& seen, std::uint32_t mark) {
  std::vector<VertexId> out(sources.begin(), sources.end());
  for (auto v : sources) seen[v] = mark;
  std::size_t level_begin = 0;
  for (std::size_t h = 0; h < hops; ++h) {
    const std::size_t level_end = out.size();
    for (std::size_t i = level_begin; i < level_end; ++i) {
      for (VertexId w : g.neighbors(out[i])) {
        if (seen[w] != mark) {
          seen[w] = mark;
          out.push_back(w);
        }
      }
    }
    level_begin = level_end;
  }
  std::sort(out.begin(), out.end());
  return out;
}

PartitionPlan make_plan(const Graph& g, const VertexMasks& masks, PartitionMethod method, std::uint32_t k,
                        std::uint64_t seed, std::vector<PartitionId> owner) {
  PartitionPlan plan;
  plan.method = method;
  plan.k = k;
  plan.seed = seed;
  plan.assignment = std::move(owner);
  plan.counts = compute_counts(g, &masks, plan.assignment, k);
  return plan;
}

}  // namespace

PartitionPlan stream_vertex_partition(const Graph& g, const VertexMasks& masks, std::uint32_t k,
                                      const StreamConfig& config, std::uint64_t seed) {
  check_common(g, masks, k);
  if (config.mode != StreamMode::Vertex) throw InputError("stream_vertex_partition needs Vertex mode");
  if (config.hop_cache_depth < 1) throw InputError("hop_cache_depth must be >= 1");
  const auto order = streaming_order(masks, seed);
  if (order.empty()) throw InputError("vertex streaming needs a non-empty train set");

  const double ideal = static_cast<double>(order.size()) / k * (1.0 + config.balance_slack);
  std::vector<PartitionId> owner(g.num_vertices(), kUnassigned);
  std::vector<double> trains(k, 0.0), score(k), overlap(k);
  for (VertexId v : order) {
    std::fill(overlap.begin(), overlap.end(), 0.0);
    for (VertexId u : g.neighbors(v)) {
      if (owner[u] != kUnassigned) overlap[owner[u]] += 1.0;
    }
    for (PartitionId i = 0; i < k; ++i) score[i] = overlap[i] * std::max(0.0, (ideal - trains[i]) / ideal);
    const PartitionId p = pick(score, trains);
    owner[v] = p;
    trains[p] += 1.0;
  }

  std::vector<std::vector<VertexId>> train_of(k);
  for (VertexId v : order) train_of[owner[v]].push_back(v);
  own_by_nearest(g, owner, k);

  PartitionPlan plan = make_plan(g, masks, PartitionMethod::StreamVertex, k, seed, std::move(owner));
  std::vector<std::uint32_t> seen(g.num_vertices(), 0);
  plan.cache_sets.resize(k);
  for (PartitionId p = 0; p < k; ++p) {
    std::sort(train_of[p].begin(), train_of[p].end());
    plan.cache_sets[p] = hop_neighborhood(g, train_of[p], config.hop_cache_depth, seen, p + 1);
  }
  return plan;
}

PartitionPlan stream_block_partition(const Graph& g, const VertexMasks& masks, std::uint32_t k,
                                     const StreamConfig& config, std::uint64_t seed) {
  check_common(g, masks, k);
  if (config.mode != StreamMode::Block) throw InputError("stream_block_partition needs Block mode");
  if (config.block_size < 1) throw InputError("block_size must be >= 1");
  const std::size_t n = g.num_vertices();

  // Block formation: BFS from each unvisited train vertex in streaming order,
  // then from every vertex still left over, in id order.
  std::vector<std::vector<VertexId>> blocks;
  std::vector<char> visited(n, 0);
  auto grow = [&](VertexId root) {
    std::vector<VertexId> block{root};
    visited[root] = 1;
    for (std::size_t i = 0; i < block.size() && block.size() < config.block_size; ++i) {
      for (VertexId w : g.neighbors(block[i])) {
        if (block.size() >= config.block_size) break;
        if (!visited[w]) {
          visited[w] = 1;
          block.push_back(w);
        }
      }
    }
    blocks.push_back(std::move(block));
  };
  for (VertexId v : streaming_order(masks, seed))
    if (!visited[v]) grow(v);
  for (std::size_t v = 0; v < n; ++v)
    if (!visited[v]) grow(static_cast<VertexId>(v));

  // Balance dimensions: train, val, test (only those present).
  const std::array<Role, 3> roles{Role::Train, Role::Val, Role::Test};
  std::array<double, 3> ideal{};
  std::vector<int> active;
  for (int d = 0; d < 3; ++d) {
    ideal[d] = static_cast<double>(masks.count(roles[d])) / k * (1.0 + config.balance_slack);
    if (ideal[d] > 0) active.push_back(d);
  }
  std::vector<std::array<double, 3>> load(k, {0.0, 0.0, 0.0});
  std::vector<double> vertices(k, 0.0), edges(k), score(k), norm(k);
  const double vertex_ideal = static_cast<double>(n) / k;

  std::vector<PartitionId> owner(n, kUnassigned);
  for (const auto& block : blocks) {
    std::fill(edges.begin(), edges.end(), 0.0);
    std::array<double, 3> need{};
    for (VertexId v : block) {
      for (VertexId u : g.neighbors(v))
        if (owner[u] != kUnassigned) edges[owner[u]] += 1.0;
      for (int d = 0; d < 3; ++d) need[d] += masks.roles[v] == roles[d] ? 1.0 : 0.0;
    }
    for (PartitionId i = 0; i < k; ++i) {
      double factor = 1.0;
      double l = 0.0;
      for (int d : active) {
        factor *= std::max(0.0, (ideal[d] - load[i][d]) / ideal[d]);
        l += load[i][d] / ideal[d];
      }
      score[i] = edges[i] * factor;
      norm[i] = active.empty() ? vertices[i] / vertex_ideal : l;
    }
    const PartitionId p = pick(score, norm);
    for (VertexId v : block) owner[v] = p;
    for (int d = 0; d < 3; ++d) load[p][d] += need[d];
    vertices[p] += static_cast<double>(block.size());
  }
  return make_plan(g, masks, PartitionMethod::StreamBlock, k, seed, std::move(owner));
}

}  // namespace gnnwb
