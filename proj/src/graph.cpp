#include "gnnwb/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "gnnwb/error.hpp"
#include "gnnwb/random.hpp"

namespace gnnwb {

Graph Graph::from_edges(std::size_t num_vertices, std::span<const Edge> edges, bool undirected) {
  std::vector<EdgeId> degree(num_vertices + 1, 0);
  auto check = [&](VertexId v) {
    if (v >= num_vertices) {
      throw InputError("vertex id " + std::to_string(v) + " out of range for " +
                       std::to_string(num_vertices) + " vertices");
    }
  };
  for (const auto& e : edges) {
    check(e.src);
    check(e.dst);
    if (e.src == e.dst) continue;
    // Slot (u -> v) lives in the row of v: rows hold in-neighbors.
    ++degree[e.dst];
    if (undirected) ++degree[e.src];
  }

  std::vector<EdgeId> offsets(num_vertices + 1, 0);
  for (std::size_t v = 0; v < num_vertices; ++v) offsets[v + 1] = offsets[v] + degree[v];
  std::vector<VertexId> cols(offsets[num_vertices]);
  std::vector<EdgeId> cursor(offsets.begin(), offsets.end() - 1);
  for (const auto& e : edges) {
    if (e.src == e.dst) continue;
    cols[cursor[e.dst]++] = e.src;
    if (undirected) cols[cursor[e.src]++] = e.dst;
  }

  // Sort and deduplicate each row, compacting in place.
  Graph g;
  g.row_offsets_.assign(num_vertices + 1, 0);
  EdgeId write = 0;
  for (std::size_t v = 0; v < num_vertices; ++v) {
    auto first = cols.begin() + static_cast<std::ptrdiff_t>(offsets[v]);
    auto last = cols.begin() + static_cast<std::ptrdiff_t>(offsets[v + 1]);
    std::sort(first, last);
    auto unique_end = std::unique(first, last);
    for (auto it = first; it != unique_end; ++it) cols[write++] = *it;
    g.row_offsets_[v + 1] = write;
  }
  cols.resize(write);
  cols.shrink_to_fit();
  g.col_indices_ = std::move(cols);
  g.meta_.undirected = undirected;
  return g;
}

Graph Graph::with_features(std::vector<float> features, std::size_t feature_dim,
                           std::uint64_t seed) && {
  if (features.size() != num_vertices() * feature_dim) {
    throw InputError("feature matrix has " + std::to_string(feature_dim ? features.size() / feature_dim : 0) +
                     " rows, graph has " + std::to_string(num_vertices()) + " vertices");
  }
  features_ = std::move(features);
  feature_dim_ = feature_dim;
  meta_.feature_seed = seed;
  return std::move(*this);
}

Graph Graph::with_labels(std::vector<std::int32_t> labels, int num_classes, std::uint64_t seed) && {
  if (labels.size() != num_vertices()) {
    throw InputError("label count " + std::to_string(labels.size()) + " != vertex count " +
                     std::to_string(num_vertices()));
  }
  for (auto l : labels) {
    if (l < 0 || l >= num_classes) throw InputError("label " + std::to_string(l) + " outside [0, num_classes)");
  }
  labels_ = std::move(labels);
  num_classes_ = num_classes;
  meta_.label_seed = seed;
  return std::move(*this);
}

Graph Graph::with_metadata(GraphMetadata meta) && {
  meta.feature_seed = meta_.feature_seed;
  meta.label_seed = meta_.label_seed;
  meta.undirected = meta_.undirected;
  meta_ = std::move(meta);
  return std::move(*this);
}

bool Graph::has_edge(VertexId u, VertexId v) const {
  // Slot u -> v is stored in v's row.
  auto nb = neighbors(v);
  return std::binary_search(nb.begin(), nb.end(), u);
}

double Graph::mean_degree() const {
  return num_vertices() == 0 ? 0.0 : static_cast<double>(num_edges()) / static_cast<double>(num_vertices());
}

std::size_t Graph::max_degree() const {
  std::size_t best = 0;
  for (std::size_t v = 0; v < num_vertices(); ++v) best = std::max(best, degree(static_cast<VertexId>(v)));
  return best;
}

std::vector<float> random_features(std::size_t n, std::size_t d, std::uint64_t seed) {
  Rng gen(seed);
  std::uniform_real_distribution<float> dist(0.0f, 1.0f);
  std::vector<float> out(n * d);
  for (auto& x : out) x = dist(gen);
  return out;
}

std::vector<std::int32_t> random_labels(std::size_t n, int num_classes, std::uint64_t seed) {
  Rng gen(seed);
  std::uniform_int_distribution<std::int32_t> dist(0, num_classes - 1);
  std::vector<std::int32_t> out(n);
  for (auto& l : out) l = dist(gen);
  return out;
}

// ---------------------------------------------------------------------------
// Generators

namespace {

// Adds edges (u, v) for v in [lo, hi), v > u, each independently with prob p,
// by geometric skipping over the candidate range.
void bernoulli_row(VertexId u, std::size_t lo, std::size_t hi, double p, Rng& gen,
                   std::vector<Edge>& out) {
  lo = std::max<std::size_t>(lo, static_cast<std::size_t>(u) + 1);
  if (lo >= hi || p <= 0.0) return;
  if (p >= 1.0) {
    for (std::size_t v = lo; v < hi; ++v) out.push_back({u, static_cast<VertexId>(v)});
    return;
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double log_q = std::log1p(-p);
  std::size_t v = lo;
  while (true) {
    double r = unit(gen);
    double skip = std::floor(std::log1p(-r) / log_q);
    if (skip >= static_cast<double>(hi - v)) break;
    v += static_cast<std::size_t>(skip);
    out.push_back({u, static_cast<VertexId>(v)});
    ++v;
    if (v >= hi) break;
  }
}

Graph generate_sbm(const GraphGenSpec& spec, Rng& gen, std::vector<std::uint32_t>& blocks) {
  const std::size_t n = spec.num_vertices;
  const std::size_t b = spec.block_count;
  std::vector<std::size_t> start(b + 1, 0);
  for (std::size_t i = 0; i < b; ++i) start[i + 1] = start[i] + n / b + (i < n % b ? 1 : 0);
  blocks.resize(n);
  for (std::size_t i = 0; i < b; ++i) {
    for (std::size_t v = start[i]; v < start[i + 1]; ++v) blocks[v] = static_cast<std::uint32_t>(i);
  }
  std::vector<double> intra(b, spec.intra_prob);
  if (!spec.block_intra_probs.empty()) intra = spec.block_intra_probs;
  std::vector<Edge> edges;
  for (std::size_t u = 0; u < n; ++u) {
    const std::size_t bu = blocks[u];
    for (std::size_t j = bu; j < b; ++j) {
      bernoulli_row(static_cast<VertexId>(u), start[j], start[j + 1],
                    j == bu ? intra[bu] : spec.inter_prob, gen, edges);
    }
  }
  return Graph::from_edges(n, edges, true);
}

Graph generate_power_law(const GraphGenSpec& spec, Rng& gen) {
  const std::size_t n = spec.num_vertices;
  const std::size_t m = spec.attach_degree;
  std::vector<Edge> edges;
  // Every edge endpoint appears once here, so a uniform pick is degree-proportional.
  std::vector<VertexId> endpoints;
  for (std::size_t u = 0; u <= m; ++u) {
    for (std::size_t v = u + 1; v <= m; ++v) {
      edges.push_back({static_cast<VertexId>(u), static_cast<VertexId>(v)});
      endpoints.push_back(static_cast<VertexId>(u));
      endpoints.push_back(static_cast<VertexId>(v));
    }
  }
  std::vector<VertexId> targets;
  for (std::size_t v = m + 1; v < n; ++v) {
    targets.clear();
    std::uniform_int_distribution<std::size_t> pick(0, endpoints.size() - 1);
    while (targets.size() < m) {
      VertexId t = endpoints[pick(gen)];
      if (std::find(targets.begin(), targets.end(), t) == targets.end()) targets.push_back(t);
    }
    for (VertexId t : targets) {
      edges.push_back({static_cast<VertexId>(v), t});
      endpoints.push_back(static_cast<VertexId>(v));
      endpoints.push_back(t);
    }
  }
  return Graph::from_edges(n, edges, true);
}

}  // namespace

Graph generate_graph(const GraphGenSpec& spec) {
  if (spec.num_vertices == 0) throw InputError("generator needs at least one vertex");
  if (spec.feature_dim == 0) throw InputError("feature_dim must be >= 1");
  if (spec.num_classes < 1) throw InputError("num_classes must be >= 1");
  Rng gen(derive_seed({spec.seed, 0x67656e}));
  std::vector<std::uint32_t> blocks;
  Graph topo;
  if (spec.kind == GeneratorKind::SBM) {
    if (spec.block_count == 0 || spec.num_vertices < spec.block_count) {
      throw InputError("SBM needs num_vertices >= block_count >= 1 (got n=" +
                       std::to_string(spec.num_vertices) + ", blocks=" +
                       std::to_string(spec.block_count) + ")");
    }
    if (!spec.block_intra_probs.empty() && spec.block_intra_probs.size() != spec.block_count) {
      throw InputError("SBM block_intra_probs needs one probability per block");
    }
    std::vector<double> probs{spec.intra_prob, spec.inter_prob};
    probs.insert(probs.end(), spec.block_intra_probs.begin(), spec.block_intra_probs.end());
    for (double p : probs) {
      if (!(p >= 0.0 && p <= 1.0)) throw InputError("SBM probabilities must lie in [0, 1]");
    }
    topo = generate_sbm(spec, gen, blocks);
  } else {
    if (spec.attach_degree < 1) throw InputError("attach_degree must be >= 1");
    if (spec.num_vertices < spec.attach_degree + 1) {
      throw InputError("PowerLaw needs num_vertices > attach_degree");
    }
    topo = generate_power_law(spec, gen);
  }

  const std::size_t n = spec.num_vertices;
  const std::uint64_t label_seed = derive_seed({spec.seed, 0x6c6162});
  const std::uint64_t feature_seed = derive_seed({spec.seed, 0x666561});
  std::vector<std::int32_t> labels;
  if (spec.label_source == LabelSource::Block && !blocks.empty()) {
    labels.resize(n);
    for (std::size_t v = 0; v < n; ++v) labels[v] = static_cast<std::int32_t>(blocks[v] % spec.num_classes);
  } else {
    labels = random_labels(n, spec.num_classes, label_seed);
  }
  auto features = random_features(n, spec.feature_dim, feature_seed);
  if (spec.feature_signal != 0.0) {
    for (std::size_t v = 0; v < n; ++v) {
      features[v * spec.feature_dim + static_cast<std::size_t>(labels[v]) % spec.feature_dim] +=
          static_cast<float>(spec.feature_signal);
    }
  }

  GraphMetadata meta;
  meta.source = spec.kind == GeneratorKind::SBM ? "sbm" : "powerlaw";
  meta.blocks = std::move(blocks);
  return std::move(topo)
      .with_metadata(std::move(meta))
      .with_features(std::move(features), spec.feature_dim, feature_seed)
      .with_labels(std::move(labels), spec.num_classes, label_seed);
}

// ---------------------------------------------------------------------------
// Masks

char role_char(Role r) {
  switch (r) {
    case Role::Train: return 'T';
    case Role::Val: return 'V';
    case Role::Test: return 'E';
    case Role::None: break;
  }
  return 'N';
}

Role role_from_char(char c) {
  switch (c) {
    case 'T': return Role::Train;
    case 'V': return Role::Val;
    case 'E': return Role::Test;
    case 'N': return Role::None;
    default: break;
  }
  throw InputError(std::string("unknown role character '") + c + "'");
}

std::size_t VertexMasks::count(Role r) const {
  return static_cast<std::size_t>(std::count(roles.begin(), roles.end(), r));
}

std::vector<VertexId> VertexMasks::vertices(Role r) const {
  std::vector<VertexId> out;
  for (std::size_t v = 0; v < roles.size(); ++v) {
    if (roles[v] == r) out.push_back(static_cast<VertexId>(v));
  }
  return out;
}

VertexMasks split_masks(std::size_t num_vertices, SplitRatios ratios, std::uint64_t seed) {
  for (double r : {ratios.train, ratios.val, ratios.test}) {
    if (r < 0.0 || r > 1.0) throw InputError("split ratios must lie in [0, 1]");
  }
  const double sum = ratios.train + ratios.val + ratios.test;
  if (sum > 1.0 + 1e-9) throw InputError("ratios sum > 1");
  const auto n = static_cast<double>(num_vertices);
  // The epsilon keeps 0.65 * 100 from flooring to 64.
  auto share = [&](double r) { return static_cast<std::size_t>(std::floor(r * n + 1e-9)); };
  const std::size_t n_val = share(ratios.val);
  const std::size_t n_test = share(ratios.test);
  std::size_t n_train = share(ratios.train);
  if (sum > 1.0 - 1e-9) n_train = num_vertices - n_val - n_test;

  std::vector<VertexId> order(num_vertices);
  std::iota(order.begin(), order.end(), VertexId{0});
  Rng gen(derive_seed({seed, 0x6d61736b}));
  seeded_shuffle(std::span<VertexId>(order), gen);

  VertexMasks masks;
  masks.roles.assign(num_vertices, Role::None);
  std::size_t i = 0;
  for (; i < n_train; ++i) masks.roles[order[i]] = Role::Train;
  for (; i < n_train + n_val; ++i) masks.roles[order[i]] = Role::Val;
  for (; i < n_train + n_val + n_test; ++i) masks.roles[order[i]] = Role::Test;
  return masks;
}

}  // namespace gnnwb
