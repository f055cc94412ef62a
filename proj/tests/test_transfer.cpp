#include <algorithm>
#include <sstream>

#include "doctest.h"
#include "gnnwb/batch.hpp"
#include "gnnwb/error.hpp"
#include "gnnwb/kernels.hpp"
#include "gnnwb/transfer.hpp"
#include "helpers.hpp"

using namespace gnnwb;
using testing::g6;

namespace {

SampledSubgraph frontier_only(std::vector<VertexId> f) {
  SampledSubgraph sg;
  sg.input_frontier = std::move(f);
  return sg;
}

CachePolicyConfig ratio(CachePolicy p, double r) {
  CachePolicyConfig c;
  c.policy = p;
  c.capacity_ratio = r;
  return c;
}

}  // namespace

TEST_CASE("degree cache on G6 keeps the two bridge vertices") {
  const Graph g = g6();
  CachePolicyConfig c;
  c.capacity_vertices = 2;
  const auto cache = build_cache(g, c, nullptr, nullptr);
  CHECK(cache.vertices == std::vector<VertexId>{2, 3});
  CHECK(cache.contains(2));
  CHECK_FALSE(cache.contains(0));
}

TEST_CASE("cache ties fall back to the tiebreak and then the lower id") {
  const std::vector<double> score{1, 3, 3, 3, 0};
  const std::vector<double> tie{0, 1, 5, 1, 0};
  CHECK(cache_top(score, tie, 2, CachePolicy::PreSampling).vertices == std::vector<VertexId>{1, 2});
  CHECK(cache_top(score, {}, 2, CachePolicy::DegreeBased).vertices == std::vector<VertexId>{1, 2});
  CHECK(cache_top(score, {}, 9, CachePolicy::DegreeBased).size() == 5);
}

TEST_CASE("cache configs are validated") {
  const Graph g = g6();
  CachePolicyConfig none;
  CHECK_THROWS_AS(build_cache(g, none, nullptr, nullptr), InputError);
  CHECK_THROWS_AS(build_cache(g, ratio(CachePolicy::DegreeBased, 1.5), nullptr, nullptr), InputError);
  CHECK_THROWS_AS(build_cache(g, ratio(CachePolicy::PreSampling, 0.5), nullptr, nullptr), InputError);
  CHECK(ratio(CachePolicy::DegreeBased, 0.3).capacity(10) == 3);
  CHECK(ratio(CachePolicy::DegreeBased, 0.1).capacity(30) == 3);
}

TEST_CASE("hit rate spans 0 to 1 with capacity and never decreases") {
  const Graph g = testing::powerlaw(1000, 3, 5);
  const VertexMasks m = split_masks(1000, {}, 5);
  SamplerConfig s;
  s.fanouts = {5, 5};
  const auto schedule = select_batches(m, 64, BatchPolicy::Random, nullptr, 1);
  const auto epoch = kernels::sample_epoch(g, schedule, s, 1, 0);
  for (auto policy : {CachePolicy::DegreeBased, CachePolicy::PreSampling}) {
    double last = -1;
    for (int i = 0; i <= 10; ++i) {
      const auto cache = build_cache(g, ratio(policy, i / 10.0), &s, &m);
      const double hr = simulate_transfer(epoch, cache, {8}).hit_rate;
      CHECK(hr >= last);
      last = hr;
      if (i == 0) CHECK(hr == 0.0);
    }
    CHECK(last == 1.0);
  }
}

TEST_CASE("pre-sampling caches train-adjacent low-degree vertices") {
  // Hub 0 joins ten leaves; vertices 11..13 form a path that holds all the
  // train vertices, so they are accessed every batch despite low degree.
  std::vector<Edge> edges;
  for (VertexId v = 1; v <= 10; ++v) edges.push_back({0, v});
  edges.push_back({11, 12});
  edges.push_back({12, 13});
  const Graph g = Graph::from_edges(14, edges);
  const VertexMasks m = testing::masks("NNNNNNNNNNNTTT");
  SamplerConfig s;
  s.fanouts = {2, 2};
  CachePolicyConfig c;
  c.capacity_vertices = 3;
  c.presample_batch_size = 1;
  c.policy = CachePolicy::PreSampling;
  const auto pre = build_cache(g, c, &s, &m);
  c.policy = CachePolicy::DegreeBased;
  const auto deg = build_cache(g, c, &s, &m);
  CHECK(pre.vertices == std::vector<VertexId>{11, 12, 13});
  CHECK(deg.contains(0));

  const auto schedule = select_batches(m, 1, BatchPolicy::Random, nullptr, 8);
  const auto epoch = kernels::sample_epoch(g, schedule, s, 8, 0);
  CHECK(simulate_transfer(epoch, pre, {4}).hit_rate > simulate_transfer(epoch, deg, {4}).hit_rate);
}

TEST_CASE("transfer bytes count uncached frontier rows") {
  CacheAssignment cache = empty_cache(6);
  cache.vertices = {1};
  cache.resident[1] = 1;
  const std::vector<SampledSubgraph> epoch{frontier_only({0, 1, 2}), frontier_only({1})};
  const auto r = simulate_transfer(epoch, cache, {10});
  CHECK(r.batches[0].transferred_vertices == 2);
  CHECK(r.batches[0].transferred_bytes_zerocopy == 80);
  CHECK(r.batches[0].transferred_bytes_explicit == doctest::Approx(80 * 1.74));
  CHECK(r.batches[1].transferred_vertices == 0);
  CHECK(r.total.cache_hits == 2);
  CHECK(r.hit_rate == doctest::Approx(0.5));
  CHECK(simulate_transfer({}, cache, {10}).hit_rate == 0.0);
}

TEST_CASE("block activity by hand") {
  // Four 4-byte rows per 16-byte block: blocks {0..3}, {4..7}, {8,9}.
  CacheAssignment cache = empty_cache(10);
  cache.vertices = {1};
  cache.resident[1] = 1;
  const std::vector<SampledSubgraph> epoch{frontier_only({0, 1, 2, 4, 8, 9})};
  const std::vector<double> th{0.5, 0.75, 1.0};
  const auto r = block_activity(epoch, 10, cache, 1, 16, th);
  CHECK(r.vertices_per_block == 4);
  CHECK(r.touched_blocks == 3);
  CHECK(r.eligible_before[0] == doctest::Approx(2.0 / 3));
  CHECK(r.eligible_before[1] == doctest::Approx(2.0 / 3));
  CHECK(r.eligible_before[2] == doctest::Approx(1.0 / 3));
  CHECK(r.eligible_after[0] == doctest::Approx(2.0 / 3));
  CHECK(r.eligible_after[1] == doctest::Approx(1.0 / 3));
  CHECK(r.eligible_after[2] == doctest::Approx(1.0 / 3));
}

TEST_CASE("block activity rejects unusable parameters") {
  const CacheAssignment cache = empty_cache(4);
  const std::vector<SampledSubgraph> epoch{frontier_only({0})};
  const std::vector<double> ok{0.5}, zero{0.0};
  CHECK_THROWS_AS(block_activity(epoch, 4, cache, 602, 1024, ok), InputError);
  CHECK_THROWS_AS(block_activity(epoch, 4, cache, 1, 16, zero), InputError);
  CHECK(block_activity(epoch, 4, cache, 602, 256 * 1024, ok).vertices_per_block == 108);
}

TEST_CASE("uniform pipeline makespans") {
  const std::vector<StageCosts> c(4, StageCosts{2, 5, 3});
  const auto seq = simulate_pipeline(c, PipelineMode::Sequential);
  const auto pipe = simulate_pipeline(c, PipelineMode::Pipelined);
  CHECK(seq.makespan == 40.0);
  CHECK(pipe.makespan == 25.0);
  CHECK(pipe.start[1][1] == 7.0);
  CHECK(pipe.finish[3][1] == 22.0);
  CHECK(pipe.busy_fraction[1] == doctest::Approx(20.0 / 25.0));
  CHECK(seq.busy_fraction[0] == doctest::Approx(8.0 / 40.0));
}

TEST_CASE("pipeline degenerate cases") {
  const std::vector<StageCosts> one{{1, 2, 3}};
  CHECK(simulate_pipeline(one, PipelineMode::Pipelined).makespan == 6.0);
  CHECK(simulate_pipeline(one, PipelineMode::Sequential).makespan == 6.0);
  const std::vector<StageCosts> zeros(3, StageCosts{0, 0, 0});
  CHECK(simulate_pipeline(zeros, PipelineMode::Pipelined).makespan == 0.0);
  CHECK_THROWS_AS(simulate_pipeline({}, PipelineMode::Pipelined), InputError);
  const std::vector<StageCosts> neg{{1, -1, 0}};
  CHECK_THROWS_AS(simulate_pipeline(neg, PipelineMode::Pipelined), InputError);
}

TEST_CASE("stage costs scale with sampled work and bytes") {
  const Graph g = g6();
  const std::vector<VertexId> batch{0};
  SamplerConfig s;
  s.num_layers = 1;
  s.fanouts = {5};
  const auto sg = sample_subgraph(g, batch, s, {});
  CostModel m;
  m.bp_per_sampled_edge = 2;
  m.bp_per_sampled_vertex = 1;
  m.dt_per_byte = 0.5;
  m.nn_per_aggregation = 3;
  const auto c = estimate_stage_costs(sg, 100, m);
  CHECK(c.bp == 2 * 2 + 3 * 1);
  CHECK(c.dt == 50);
  CHECK(c.nn == 6);
  CHECK(c.total() == c.bp + c.dt + c.nn);
  m.dt_per_byte = -1;
  CHECK_THROWS_AS(estimate_stage_costs(sg, 100, m), InputError);
}

TEST_CASE("transfer, block and pipeline CSVs have stable headers") {
  std::ostringstream t, b, p;
  const std::vector<SampledSubgraph> epoch{frontier_only({0})};
  write_transfer_csv(t, simulate_transfer(epoch, empty_cache(1), {1}));
  const std::vector<double> th{1.0};
  write_block_activity_csv(b, block_activity(epoch, 1, empty_cache(1), 1, 4, th));
  const std::vector<StageCosts> c{{1, 1, 1}};
  write_pipeline_csv(p, simulate_pipeline(c, PipelineMode::Pipelined));
  CHECK(t.str().rfind("batch,requested_vertices,", 0) == 0);
  CHECK(b.str().rfind("threshold,eligible_before,", 0) == 0);
  CHECK(p.str().rfind("batch,bp,dt,nn,", 0) == 0);
}

TEST_CASE("default cost model puts data transfer near half the batch time") {
  // Synthetic suite: four SBMs and two PowerLaw graphs, 64-dim features,
  // batch 128, fanout (10, 5), no cache.
  struct Spec {
    GeneratorKind kind;
    std::size_t n, blocks;
    double intra, inter;
  };
  const std::vector<Spec> suite{{GeneratorKind::SBM, 1000, 4, .04, .002},   {GeneratorKind::SBM, 2000, 8, .03, .001},
                                {GeneratorKind::SBM, 3000, 6, .02, .001},   {GeneratorKind::SBM, 4000, 8, .02, .0005},
                                {GeneratorKind::PowerLaw, 5000, 4, 0, 0}, {GeneratorKind::PowerLaw, 10000, 3, 0, 0}};
  SamplerConfig s;
  s.fanouts = {10, 5};
  double sum = 0;
  for (const auto& spec : suite) {
    GraphGenSpec gs;
    gs.kind = spec.kind;
    gs.num_vertices = spec.n;
    gs.block_count = spec.blocks;
    gs.intra_prob = spec.intra;
    gs.inter_prob = spec.inter;
    gs.attach_degree = spec.blocks;
    gs.feature_dim = 64;
    gs.seed = 7;
    const Graph g = generate_graph(gs);
    const VertexMasks m = split_masks(g.num_vertices(), {}, 1);
    const auto epoch = kernels::sample_epoch(g, select_batches(m, 128, BatchPolicy::Random, nullptr, 1), s, 1, 0);
    const auto r = simulate_transfer(epoch, empty_cache(g.num_vertices()), {64});
    double dt = 0, total = 0;
    for (std::size_t b = 0; b < epoch.size(); ++b) {
      const auto c = estimate_stage_costs(epoch[b], r.batches[b].transferred_bytes_explicit, CostModel{});
      dt += c.dt;
      total += c.total();
    }
    sum += dt / total;
  }
  const double mean = sum / suite.size();
  MESSAGE("mean DT fraction " << mean);
  CHECK(mean >= 0.45);
  CHECK(mean <= 0.65);
}
