#include "gnnwb/metrics.hpp"

#include <algorithm>
#include <iomanip>
#include <ostream>

#include "gnnwb/error.hpp"
#include "gnnwb/kernels.hpp"

namespace gnnwb {

Summary summarize(std::span<const double> values) {
  if (values.empty()) throw InputError("summarize: empty list");
  Summary s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  double sq = 0.0;
  for (double v : values) sq += (v - s.mean) * (v - s.mean);
  s.variance = sq / static_cast<double>(values.size());
  const double mx = *std::max_element(values.begin(), values.end());
  s.imbalance = s.mean == 0.0 ? 1.0 : mx / s.mean;
  return s;
}

namespace {

void check_plan(const Graph& g, const PartitionPlan& plan) {
  if (plan.assignment.size() != g.num_vertices()) {
    throw InputError("plan covers " + std::to_string(plan.assignment.size()) + " vertices, graph has " +
                     std::to_string(g.num_vertices()));
  }
  if (plan.has_cache() && plan.cache_sets.size() != plan.k) throw InputError("plan cache sets do not match k");
}

void check_owner(const PartitionPlan& plan, const SampledSubgraph& sg) {
  if (sg.owner >= plan.k) throw InputError("batch owner " + std::to_string(sg.owner) + " >= k");
}

template <typename T>
double imbalance_of(const std::vector<T>& rows, auto field) {
  std::vector<double> values;
  for (const auto& r : rows) values.push_back(static_cast<double>(field(r)));
  return summarize(values).imbalance;
}

}  // namespace

std::uint64_t edge_cut(const Graph& g, const PartitionPlan& plan) {
  check_plan(g, plan);
  const bool undirected = g.metadata().undirected;
  std::uint64_t cut = 0;
  for (std::size_t vi = 0; vi < g.num_vertices(); ++vi) {
    const auto v = static_cast<VertexId>(vi);
    for (VertexId u : g.neighbors(v)) {
      if (plan.owner(u) == plan.owner(v)) continue;
      // Count each unordered pair once: from its lower endpoint's slot, or from
      // the only slot when a directed pair is one-way.
      if (u < v || (!undirected && !g.has_edge(v, u))) ++cut;
    }
  }
  return cut;
}

LoadReport comp_load(const Graph& g, const PartitionPlan& plan, std::span<const SampledSubgraph> epoch) {
  check_plan(g, plan);
  LoadReport r;
  r.partitions.resize(plan.k);
  for (const auto& sg : epoch) {
    check_owner(plan, sg);
    auto& own = r.partitions[sg.owner];
    own.sampled_vertices += sg.sampled_vertices();
    for (const auto& layer : sg.layers) {
      own.sampled_edges += layer.num_edges();
      for (VertexId u : layer.src) {
        const PartitionId server = plan.owner(u);
        if (server == sg.owner) ++own.local_sample_requests;
        else ++r.partitions[server].remote_sample_requests;
      }
    }
  }
  for (const auto& row : r.partitions) {
    r.total.sampled_vertices += row.sampled_vertices;
    r.total.sampled_edges += row.sampled_edges;
    r.total.local_sample_requests += row.local_sample_requests;
    r.total.remote_sample_requests += row.remote_sample_requests;
  }
  r.imbalance = imbalance_of(r.partitions, [](const LoadReport::Row& row) { return row.workload(); });
  return r;
}

CommReport comm_load(const Graph& g, const PartitionPlan& plan, std::span<const SampledSubgraph> epoch,
                     std::size_t feature_dim) {
  check_plan(g, plan);
  CommReport r;
  r.feature_dim = feature_dim;
  r.partitions.resize(plan.k);
  for (const auto& sg : epoch) {
    check_owner(plan, sg);
    // The frontier is already duplicate-free, so each remote vertex is sent once per batch.
    for (VertexId v : sg.input_frontier) {
      if (plan.is_resident(v, sg.owner)) continue;
      auto& row = r.partitions[plan.owner(v)];
      ++row.sent_vertices;
      row.sent_feature_bytes += static_cast<std::uint64_t>(feature_dim) * 4;
    }
    for (const auto& layer : sg.layers) {
      for (std::size_t i = 0; i < layer.dst.size(); ++i) {
        const VertexId v = layer.dst[i];
        if (!plan.is_resident(v, sg.owner)) r.partitions[plan.owner(v)].sent_subgraph_edges += layer.sampled(i).size();
      }
    }
  }
  for (const auto& row : r.partitions) {
    r.total.sent_vertices += row.sent_vertices;
    r.total.sent_feature_bytes += row.sent_feature_bytes;
    r.total.sent_subgraph_edges += row.sent_subgraph_edges;
  }
  r.imbalance = imbalance_of(r.partitions, [](const CommReport::Row& row) { return row.sent_feature_bytes; });
  return r;
}

ClusteringStats clustering_stats(const Graph& g, std::span<const std::vector<VertexId>> sets) {
  ClusteringStats s;
  for (const auto& set : sets) {
    std::vector<VertexId> members(set);
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    for (VertexId v : members)
      if (v >= g.num_vertices()) throw InputError("clustering set vertex out of range");
    auto cc = kernels::local_clustering(g, members);
    double sum = 0.0;
    for (double c : cc) sum += c;
    s.set_means.push_back(cc.empty() ? 0.0 : sum / static_cast<double>(cc.size()));
    s.per_vertex.push_back(std::move(cc));
  }
  if (!s.set_means.empty()) {
    const auto sum = summarize(s.set_means);
    s.mean = sum.mean;
    s.variance = sum.variance;
  }
  return s;
}

ClusteringStats subgraph_clustering_stats(std::span<const SampledSubgraph> epoch) {
  ClusteringStats s;
  for (const auto& sg : epoch) {
    const auto& ids = sg.input_frontier;
    auto local = [&](VertexId v) {
      const auto it = std::lower_bound(ids.begin(), ids.end(), v);
      if (it == ids.end() || *it != v) throw InputError("sampled vertex missing from the input frontier");
      return static_cast<VertexId>(it - ids.begin());
    };
    std::vector<Edge> edges;
    for (const auto& layer : sg.layers) {
      for (std::size_t i = 0; i < layer.dst.size(); ++i) {
        const VertexId d = local(layer.dst[i]);
        for (VertexId u : layer.sampled(i)) edges.push_back({local(u), d});
      }
    }
    const Graph h = Graph::from_edges(ids.size(), edges, true);
    std::vector<VertexId> all(ids.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<VertexId>(i);
    auto cc = kernels::local_clustering(h, all);
    double sum = 0.0;
    for (double c : cc) sum += c;
    s.set_means.push_back(cc.empty() ? 0.0 : sum / static_cast<double>(cc.size()));
    s.per_vertex.push_back(std::move(cc));
  }
  if (!s.set_means.empty()) {
    const auto sum = summarize(s.set_means);
    s.mean = sum.mean;
    s.variance = sum.variance;
  }
  return s;
}

void write_load_csv(std::ostream& out, const LoadReport& r) {
  out << "partition,sampled_vertices,sampled_edges,local_sample_requests,remote_sample_requests,workload\n";
  auto row = [&](const std::string& name, const LoadReport::Row& x) {
    out << name << ',' << x.sampled_vertices << ',' << x.sampled_edges << ',' << x.local_sample_requests << ','
        << x.remote_sample_requests << ',' << x.workload() << '\n';
  };
  for (std::size_t p = 0; p < r.partitions.size(); ++p) row(std::to_string(p), r.partitions[p]);
  row("total", r.total);
  out << "imbalance,,,,," << std::setprecision(10) << r.imbalance << '\n';
}

void write_comm_csv(std::ostream& out, const CommReport& r) {
  out << "partition,sent_vertices,sent_feature_bytes,sent_subgraph_edges\n";
  auto row = [&](const std::string& name, const CommReport::Row& x) {
    out << name << ',' << x.sent_vertices << ',' << x.sent_feature_bytes << ',' << x.sent_subgraph_edges << '\n';
  };
  for (std::size_t p = 0; p < r.partitions.size(); ++p) row(std::to_string(p), r.partitions[p]);
  row("total", r.total);
  out << "imbalance,," << std::setprecision(10) << r.imbalance << ",\n";
}

}  // namespace gnnwb
