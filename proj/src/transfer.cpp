#include "gnnwb/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>

#include "gnnwb/batch.hpp"
#include "gnnwb/error.hpp"
#include "gnnwb/kernels.hpp"
#include "gnnwb/random.hpp"

namespace gnnwb {

std::string to_string(CachePolicy p) {
  return p == CachePolicy::DegreeBased ? "degree" : "presample";
}

std::string to_string(PipelineMode m) {
  return m == PipelineMode::Sequential ? "sequential" : "pipelined";
}

void CachePolicyConfig::validate() const {
  if (capacity_vertices.has_value() == capacity_ratio.has_value()) {
    throw InputError("cache: set exactly one of capacity_vertices and capacity_ratio");
  }
  if (capacity_ratio && !(*capacity_ratio >= 0.0 && *capacity_ratio <= 1.0)) {
    throw InputError("cache: capacity_ratio must lie in [0, 1]");
  }
  if (policy == CachePolicy::PreSampling) {
    if (presample_epochs < 1) throw InputError("cache: presample_epochs must be >= 1");
    if (presample_batch_size < 1) throw InputError("cache: presample_batch_size must be >= 1");
  }
}

std::size_t CachePolicyConfig::capacity(std::size_t num_vertices) const {
  std::size_t c = 0;
  if (capacity_vertices) c = *capacity_vertices;
  else if (capacity_ratio) c = static_cast<std::size_t>(std::floor(*capacity_ratio * static_cast<double>(num_vertices) + 1e-9));
  return std::min(c, num_vertices);
}

CacheAssignment empty_cache(std::size_t num_vertices) {
  CacheAssignment c;
  c.resident.assign(num_vertices, 0);
  return c;
}

CacheAssignment cache_top(std::span<const double> score, std::span<const double> tiebreak, std::size_t capacity,
                          CachePolicy policy) {
  const std::size_t n = score.size();
  capacity = std::min(capacity, n);
  std::vector<VertexId> order(n);
  std::iota(order.begin(), order.end(), VertexId{0});
  auto better = [&](VertexId a, VertexId b) {
    if (score[a] != score[b]) return score[a] > score[b];
    if (!tiebreak.empty() && tiebreak[a] != tiebreak[b]) return tiebreak[a] > tiebreak[b];
    return a < b;
  };
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(capacity), order.end(), better);
  CacheAssignment c = empty_cache(n);
  c.policy = policy;
  c.capacity = capacity;
  c.vertices.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(capacity));
  std::sort(c.vertices.begin(), c.vertices.end());
  for (VertexId v : c.vertices) c.resident[v] = 1;
  return c;
}

CacheAssignment build_cache(const Graph& g, const CachePolicyConfig& config, const SamplerConfig* sampler,
                            const VertexMasks* masks) {
  config.validate();
  const std::size_t n = g.num_vertices();
  std::vector<double> degree(n);
  for (std::size_t v = 0; v < n; ++v) degree[v] = static_cast<double>(g.degree(static_cast<VertexId>(v)));
  const std::size_t capacity = config.capacity(n);
  if (config.policy == CachePolicy::DegreeBased) return cache_top(degree, {}, capacity, CachePolicy::DegreeBased);

  if (sampler == nullptr || masks == nullptr) throw InputError("pre-sampling cache needs a sampler config and masks");
  std::vector<double> access(n, 0.0);
  for (std::size_t e = 0; e < config.presample_epochs; ++e) {
    const std::uint64_t seed = derive_seed({config.seed, 0x707265, e});
    const auto schedule = select_batches(*masks, config.presample_batch_size, BatchPolicy::Random, nullptr, seed);
    const auto epoch = kernels::sample_epoch(g, schedule, *sampler, seed, e);
    const auto counts = kernels::access_counts(epoch, n);
    for (std::size_t v = 0; v < n; ++v) access[v] += static_cast<double>(counts[v]);
  }
  return cache_top(access, degree, capacity, CachePolicy::PreSampling);
}

TransferReport simulate_transfer(std::span<const SampledSubgraph> epoch, const CacheAssignment& cache,
                                 const TransferModel& model) {
  TransferReport r;
  for (const auto& sg : epoch) {
    TransferRow row;
    row.requested_vertices = sg.input_frontier.size();
    for (VertexId v : sg.input_frontier)
      if (cache.contains(v)) ++row.cache_hits;
    row.transferred_vertices = row.requested_vertices - row.cache_hits;
    row.transferred_bytes_zerocopy = row.transferred_vertices * model.feature_bytes();
    row.transferred_bytes_explicit = static_cast<double>(row.transferred_bytes_zerocopy) * (1.0 + model.gather_ratio);
    r.total.requested_vertices += row.requested_vertices;
    r.total.cache_hits += row.cache_hits;
    r.total.transferred_vertices += row.transferred_vertices;
    r.total.transferred_bytes_zerocopy += row.transferred_bytes_zerocopy;
    r.total.transferred_bytes_explicit += row.transferred_bytes_explicit;
    r.batches.push_back(row);
  }
  if (r.total.requested_vertices > 0) {
    r.hit_rate = static_cast<double>(r.total.cache_hits) / static_cast<double>(r.total.requested_vertices);
  }
  return r;
}

BlockActivityReport block_activity(std::span<const SampledSubgraph> epoch, std::size_t num_vertices,
                                   const CacheAssignment& cache, std::size_t feature_dim,
                                   std::size_t block_bytes, std::span<const double> thresholds) {
  if (feature_dim == 0) throw InputError("block activity: feature_dim must be >= 1");
  BlockActivityReport r;
  r.block_bytes = block_bytes;
  r.vertices_per_block = block_bytes / (feature_dim * 4);
  if (r.vertices_per_block < 1) {
    throw InputError("block activity: " + std::to_string(block_bytes) + "-byte blocks cannot hold one " +
                     std::to_string(feature_dim * 4) + "-byte feature row");
  }
  for (double t : thresholds) {
    if (!(t > 0.0 && t <= 1.0)) throw InputError("block activity: thresholds must lie in (0, 1]");
  }
  r.thresholds.assign(thresholds.begin(), thresholds.end());
  const std::size_t vpb = r.vertices_per_block;
  const std::size_t num_blocks = (num_vertices + vpb - 1) / vpb;

  std::vector<std::uint64_t> before(thresholds.size(), 0), after(thresholds.size(), 0);
  std::vector<std::uint32_t> active(num_blocks, 0), uncached(num_blocks, 0);
  std::vector<std::size_t> touched;
  for (const auto& sg : epoch) {
    touched.clear();
    for (VertexId v : sg.input_frontier) {
      if (v >= num_vertices) throw InputError("block activity: frontier vertex out of range");
      const std::size_t b = v / vpb;
      if (active[b]++ == 0) touched.push_back(b);
      if (!cache.contains(v)) ++uncached[b];
    }
    for (std::size_t b : touched) {
      const double size = static_cast<double>(std::min(vpb, num_vertices - b * vpb));
      for (std::size_t t = 0; t < thresholds.size(); ++t) {
        // Inclusive: a block exactly at the threshold is eligible.
        const double need = thresholds[t] * size - 1e-9;
        if (active[b] >= need) ++before[t];
        if (uncached[b] >= need) ++after[t];
      }
      active[b] = 0;
      uncached[b] = 0;
    }
    r.touched_blocks += touched.size();
  }
  const double denom = r.touched_blocks == 0 ? 1.0 : static_cast<double>(r.touched_blocks);
  for (std::size_t t = 0; t < thresholds.size(); ++t) {
    r.eligible_before.push_back(static_cast<double>(before[t]) / denom);
    r.eligible_after.push_back(static_cast<double>(after[t]) / denom);
  }
  return r;
}

PipelineTimeline simulate_pipeline(std::span<const StageCosts> costs, PipelineMode mode) {
  if (costs.empty()) throw InputError("pipeline: need at least one batch");
  for (const auto& c : costs) {
    if (c.bp < 0 || c.dt < 0 || c.nn < 0) throw InputError("pipeline: negative stage cost");
  }
  PipelineTimeline t;
  t.mode = mode;
  t.costs.assign(costs.begin(), costs.end());
  t.start.resize(costs.size());
  t.finish.resize(costs.size());
  std::array<double, 3> busy{};
  for (std::size_t b = 0; b < costs.size(); ++b) {
    const std::array<double, 3> c{costs[b].bp, costs[b].dt, costs[b].nn};
    for (int s = 0; s < 3; ++s) {
      double ready = 0.0;
      if (mode == PipelineMode::Sequential) {
        ready = s > 0 ? t.finish[b][s - 1] : (b > 0 ? t.finish[b - 1][2] : 0.0);
      } else {
        if (b > 0) ready = t.finish[b - 1][s];
        if (s > 0) ready = std::max(ready, t.finish[b][s - 1]);
      }
      t.start[b][s] = ready;
      t.finish[b][s] = ready + c[s];
      busy[s] += c[s];
    }
  }
  t.makespan = t.finish.back()[2];
  for (int s = 0; s < 3; ++s) t.busy_fraction[s] = t.makespan > 0 ? busy[s] / t.makespan : 0.0;
  return t;
}

void CostModel::validate() const {
  if (bp_per_sampled_edge < 0 || bp_per_sampled_vertex < 0 || dt_per_byte < 0 || nn_per_aggregation < 0) {
    throw InputError("cost model coefficients must be non-negative");
  }
}

StageCosts estimate_stage_costs(const SampledSubgraph& sg, double transferred_bytes, const CostModel& model) {
  model.validate();
  if (transferred_bytes < 0) throw InputError("transferred bytes must be non-negative");
  const auto edges = static_cast<double>(sg.sampled_edges());
  const auto vertices = static_cast<double>(sg.sampled_vertices());
  return {edges * model.bp_per_sampled_edge + vertices * model.bp_per_sampled_vertex,
          transferred_bytes * model.dt_per_byte, edges * model.nn_per_aggregation};
}

void write_transfer_csv(std::ostream& out, const TransferReport& r) {
  out << "batch,requested_vertices,cache_hits,transferred_vertices,transferred_bytes_explicit,"
         "transferred_bytes_zerocopy\n";
  out << std::setprecision(12);
  auto row = [&](const std::string& name, const TransferRow& x) {
    out << name << ',' << x.requested_vertices << ',' << x.cache_hits << ',' << x.transferred_vertices << ','
        << x.transferred_bytes_explicit << ',' << x.transferred_bytes_zerocopy << '\n';
  };
  for (std::size_t b = 0; b < r.batches.size(); ++b) row(std::to_string(b), r.batches[b]);
  row("total", r.total);
}

void write_block_activity_csv(std::ostream& out, const BlockActivityReport& r) {
  out << "threshold,eligible_before,eligible_after,touched_blocks,vertices_per_block,block_bytes\n";
  out << std::setprecision(10);
  for (std::size_t t = 0; t < r.thresholds.size(); ++t) {
    out << r.thresholds[t] << ',' << r.eligible_before[t] << ',' << r.eligible_after[t] << ',' << r.touched_blocks
        << ',' << r.vertices_per_block << ',' << r.block_bytes << '\n';
  }
}

void write_pipeline_csv(std::ostream& out, const PipelineTimeline& t) {
  out << "batch,bp,dt,nn,bp_start,dt_start,nn_start,nn_finish\n";
  out << std::setprecision(12);
  for (std::size_t b = 0; b < t.costs.size(); ++b) {
    out << b << ',' << t.costs[b].bp << ',' << t.costs[b].dt << ',' << t.costs[b].nn << ',' << t.start[b][0] << ','
        << t.start[b][1] << ',' << t.start[b][2] << ',' << t.finish[b][2] << '\n';
  }
}

}  // namespace gnnwb
