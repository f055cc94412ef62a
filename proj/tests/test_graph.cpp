#include <cmath>
#include <filesystem>
#include <numeric>
#include <sstream>

#include "doctest.h"
#include "gnnwb/error.hpp"
#include "gnnwb/graph.hpp"
#include "helpers.hpp"

using namespace gnnwb;

TEST_CASE("G6 edge list builds a symmetric CSR") {
  const Graph g = testing::g6();
  CHECK(g.num_vertices() == 6);
  CHECK(g.num_edges() == 14);
  CHECK(g.degree(2) == 3);
  const auto n2 = g.neighbors(2);
  CHECK(std::vector<VertexId>(n2.begin(), n2.end()) == std::vector<VertexId>{0, 1, 3});
  CHECK(g.has_edge(2, 3));
  CHECK(g.has_edge(3, 2));
  CHECK_FALSE(g.has_edge(0, 5));
  CHECK(g.mean_degree() == doctest::Approx(14.0 / 6.0));
  CHECK(g.max_degree() == 3);
}

TEST_CASE("duplicates and self-loops are dropped") {
  const std::vector<Edge> edges{{0, 1}, {1, 0}, {0, 1}, {2, 2}, {1, 2}};
  const Graph g = Graph::from_edges(3, edges);
  CHECK(g.num_edges() == 4);
  CHECK_FALSE(g.has_edge(2, 2));
}

TEST_CASE("directed graphs keep one slot per edge") {
  const std::vector<Edge> edges{{0, 1}, {1, 2}};
  const Graph g = Graph::from_edges(3, edges, false);
  CHECK(g.num_edges() == 2);
  // Rows are in-neighborhoods.
  CHECK(g.neighbors(1).size() == 1);
  CHECK(g.neighbors(1)[0] == 0);
  CHECK(g.neighbors(0).empty());
}

TEST_CASE("out-of-range endpoints are rejected") {
  const std::vector<Edge> edges{{0, 3}};
  CHECK_THROWS_AS(Graph::from_edges(3, edges), InputError);
}

TEST_CASE("edge list parsing skips comments and loads with generated attributes") {
  std::istringstream in("# header\n0 1\n1 2  # trailing\n\n2 0\n");
  const auto edges = parse_edge_list(in);
  CHECK(edges.size() == 3);
  std::istringstream again("0 1\n1 2\n2 0\n");
  LoadOptions o;
  o.feature_dim = 5;
  o.num_classes = 3;
  const Graph g = load_graph(again, o);
  CHECK(g.num_vertices() == 3);
  CHECK(g.feature_dim() == 5);
  CHECK(g.labels().size() == 3);
  for (auto l : g.labels()) CHECK((l >= 0 && l < 3));
}

TEST_CASE("malformed edge lines are reported") {
  std::istringstream in("0 1\nfoo bar\n");
  CHECK_THROWS_AS(parse_edge_list(in), InputError);
}

TEST_CASE("feature files round-trip in text and binary form") {
  FeatureMatrix m{2, 3, {0.5f, 1.0f, -2.0f, 3.25f, 0.0f, 7.0f}};
  std::stringstream text;
  write_features_text(text, m);
  const auto t = read_features_text(text);
  CHECK(t.rows == 2);
  CHECK(t.cols == 3);
  CHECK(t.values == m.values);

  const auto path = (std::filesystem::temp_directory_path() / "gnnwb_test_features.bin").string();
  write_features_binary(path, m);
  const auto b = read_features_file(path);
  CHECK(b.rows == 2);
  CHECK(b.values == m.values);
  std::filesystem::remove(path);
  std::filesystem::remove(path + ".desc");
}

TEST_CASE("SBM with certain edges gives two disjoint triangles") {
  GraphGenSpec s;
  s.num_vertices = 6;
  s.block_count = 2;
  s.intra_prob = 1.0;
  s.inter_prob = 0.0;
  const Graph g = generate_graph(s);
  CHECK(g.num_edges() == 12);
  CHECK(g.has_edge(0, 2));
  CHECK(g.has_edge(3, 5));
  CHECK_FALSE(g.has_edge(2, 3));
  CHECK(g.metadata().blocks == std::vector<std::uint32_t>{0, 0, 0, 1, 1, 1});
}

TEST_CASE("SBM intra-block edge count tracks its expectation") {
  GraphGenSpec s;
  s.num_vertices = 400;
  s.block_count = 2;
  s.intra_prob = 0.1;
  s.inter_prob = 0.0;
  s.seed = 3;
  const Graph g = generate_graph(s);
  const double expected = 2 * 0.1 * (200.0 * 199.0 / 2.0);  // 3980
  const double sd = std::sqrt(2 * 0.1 * 0.9 * (200.0 * 199.0 / 2.0));
  CHECK(std::abs(g.num_edges() / 2.0 - expected) < 4 * sd);
}

TEST_CASE("per-block densities override the shared intra probability") {
  GraphGenSpec s;
  s.num_vertices = 6;
  s.block_count = 2;
  s.block_intra_probs = {1.0, 0.0};
  s.inter_prob = 0.0;
  const Graph g = generate_graph(s);
  CHECK(g.num_edges() == 6);
  CHECK(g.has_edge(0, 1));
  CHECK_FALSE(g.has_edge(3, 4));
  s.block_intra_probs = {1.0};
  CHECK_THROWS_AS(generate_graph(s), InputError);
}

TEST_CASE("SBM needs at least as many vertices as blocks") {
  GraphGenSpec s;
  s.num_vertices = 5;
  s.block_count = 6;
  CHECK_THROWS_AS(generate_graph(s), InputError);
}

TEST_CASE("PowerLaw degrees are more skewed than an SBM of equal edge count") {
  GraphGenSpec pl;
  pl.kind = GeneratorKind::PowerLaw;
  pl.num_vertices = 1000;
  pl.attach_degree = 2;
  pl.seed = 7;
  const Graph a = generate_graph(pl);
  // Four blocks of 250 with inter = intra / 10: choose intra so expected
  // undirected edges match.
  const double pairs_in = 4 * 250.0 * 249.0 / 2.0, pairs_out = 6 * 250.0 * 250.0;
  const double intra = (a.num_edges() / 2.0) / (pairs_in + pairs_out / 10.0);
  GraphGenSpec sb;
  sb.num_vertices = 1000;
  sb.block_count = 4;
  sb.intra_prob = intra;
  sb.inter_prob = intra / 10.0;
  const Graph b = generate_graph(sb);
  auto degree_variance = [](const Graph& g) {
    double mean = g.mean_degree(), var = 0;
    for (VertexId v = 0; v < g.num_vertices(); ++v) var += std::pow(g.degree(v) - mean, 2);
    return var / g.num_vertices();
  };
  CHECK(degree_variance(a) > degree_variance(b));
  CHECK(a.max_degree() > 5 * 2 * 2);  // hub well above the median degree of about 2m
}

TEST_CASE("generators are deterministic per seed") {
  GraphGenSpec s;
  s.kind = GeneratorKind::PowerLaw;
  s.num_vertices = 300;
  s.attach_degree = 3;
  s.seed = 11;
  const Graph a = generate_graph(s), b = generate_graph(s);
  CHECK(std::equal(a.col_indices().begin(), a.col_indices().end(), b.col_indices().begin(), b.col_indices().end()));
  CHECK(std::equal(a.features().begin(), a.features().end(), b.features().begin(), b.features().end()));
}

TEST_CASE("feature signal lifts the label's feature") {
  GraphGenSpec s;
  s.num_vertices = 50;
  s.block_count = 2;
  s.feature_dim = 4;
  s.num_classes = 2;
  s.label_source = LabelSource::Block;
  s.feature_signal = 2.0;
  const Graph g = generate_graph(s);
  for (VertexId v = 0; v < g.num_vertices(); ++v) {
    const auto x = g.features(v);
    const auto lab = static_cast<std::size_t>(g.label(v));
    CHECK(x[lab] >= 2.0f);
    for (std::size_t j = 0; j < x.size(); ++j)
      if (j != lab) CHECK(x[j] < 1.0f);
  }
}

TEST_CASE("role masks split disjointly and round-trip") {
  const VertexMasks m = split_masks(101, {}, 5);
  CHECK(m.count(Role::Val) == 10);
  CHECK(m.count(Role::Test) == 25);
  CHECK(m.count(Role::Train) == 66);
  std::stringstream io;
  write_masks(io, m);
  const VertexMasks back = read_masks(io);
  CHECK(back.roles == m.roles);

  const VertexMasks partial = split_masks(100, {0.5, 0.1, 0.1}, 5);
  CHECK(partial.count(Role::Train) == 50);
  CHECK(partial.count(Role::None) == 30);
}
