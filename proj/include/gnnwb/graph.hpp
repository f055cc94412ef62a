#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace gnnwb {

using VertexId = std::uint32_t;
using EdgeId = std::uint64_t;

struct Edge {
  VertexId src;
  VertexId dst;
};

struct GraphMetadata {
  bool undirected = true;
  std::uint64_t feature_seed = 0;
  std::uint64_t label_seed = 0;
  std::string source;
  // Planted community per vertex (SBM generator only; empty otherwise).
  std::vector<std::uint32_t> blocks;
};

/// Immutable CSR adjacency with dense 32-bit features and integer labels.
///
/// Neighbor lists are sorted ascending and duplicate-free; self-loops are never
/// stored. Undirected inputs are kept as two directed slots per edge, so
/// neighbors(v) is the in-neighborhood used for aggregation and sampling.
class Graph {
 public:
  Graph() = default;

  /// Builds the topology from an edge list. Duplicate edges and self-loops are
  /// dropped. Throws InputError when an endpoint is >= num_vertices.
  static Graph from_edges(std::size_t num_vertices, std::span<const Edge> edges,
                          bool undirected = true);

  Graph with_features(std::vector<float> features, std::size_t feature_dim,
                      std::uint64_t seed = 0) &&;
  Graph with_labels(std::vector<std::int32_t> labels, int num_classes,
                    std::uint64_t seed = 0) &&;
  Graph with_metadata(GraphMetadata meta) &&;

  std::size_t num_vertices() const { return row_offsets_.empty() ? 0 : row_offsets_.size() - 1; }
  std::size_t num_edges() const { return col_indices_.size(); }

  std::span<const EdgeId> row_offsets() const { return row_offsets_; }
  std::span<const VertexId> col_indices() const { return col_indices_; }

  std::span<const VertexId> neighbors(VertexId v) const {
    return {col_indices_.data() + row_offsets_[v],
            static_cast<std::size_t>(row_offsets_[v + 1] - row_offsets_[v])};
  }
  std::size_t degree(VertexId v) const {
    return static_cast<std::size_t>(row_offsets_[v + 1] - row_offsets_[v]);
  }
  bool has_edge(VertexId u, VertexId v) const;
  double mean_degree() const;
  std::size_t max_degree() const;

  std::size_t feature_dim() const { return feature_dim_; }
  std::span<const float> features() const { return features_; }
  std::span<const float> features(VertexId v) const {
    return {features_.data() + static_cast<std::size_t>(v) * feature_dim_, feature_dim_};
  }

  std::span<const std::int32_t> labels() const { return labels_; }
  std::int32_t label(VertexId v) const { return labels_[v]; }
  int num_classes() const { return num_classes_; }

  const GraphMetadata& metadata() const { return meta_; }

 private:
  std::vector<EdgeId> row_offsets_{0};
  std::vector<VertexId> col_indices_;
  std::size_t feature_dim_ = 0;
  std::vector<float> features_;
  std::vector<std::int32_t> labels_;
  int num_classes_ = 0;
  GraphMetadata meta_;
};

/// Uniform [0,1) features, row-major n x d.
std::vector<float> random_features(std::size_t n, std::size_t d, std::uint64_t seed);
/// Uniform labels over [0, num_classes).
std::vector<std::int32_t> random_labels(std::size_t n, int num_classes, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Loading

struct LoadOptions {
  std::optional<std::size_t> num_vertices;  // default: max id + 1
  bool undirected = true;
  std::size_t feature_dim = 16;  // used only when features are generated
  int num_classes = 4;           // used only when labels are generated
  std::uint64_t seed = 0;
};

/// Parses "src dst" lines ('#' starts a comment) into a list of edges.
std::vector<Edge> parse_edge_list(std::istream& in);

/// Reads an edge list plus optional feature/label streams. Missing features or
/// labels are generated uniformly at random from options.seed.
Graph load_graph(std::istream& edges, const LoadOptions& options,
                 std::istream* features = nullptr, std::istream* labels = nullptr);
Graph load_graph_files(const std::string& edge_path, const LoadOptions& options,
                       const std::string& feature_path = {}, const std::string& label_path = {});

struct FeatureMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<float> values;
};

/// Text features: header "n d" followed by n rows of d reals.
FeatureMatrix read_features_text(std::istream& in);
void write_features_text(std::ostream& out, const FeatureMatrix& m);
/// Binary features: raw little-endian float32 rows in `path`, and an 8-byte
/// descriptor in `path + ".desc"` holding (n, d) as little-endian uint32.
FeatureMatrix read_features_binary(const std::string& path);
void write_features_binary(const std::string& path, const FeatureMatrix& m);
/// Dispatches on extension: ".bin" is binary, anything else is text.
FeatureMatrix read_features_file(const std::string& path);

/// One integer label per line.
std::vector<std::int32_t> read_labels(std::istream& in);

// ---------------------------------------------------------------------------
// Generation

enum class GeneratorKind { SBM, PowerLaw };
enum class LabelSource { Random, Block };

struct GraphGenSpec {
  GeneratorKind kind = GeneratorKind::SBM;
  std::size_t num_vertices = 1000;
  // SBM
  std::size_t block_count = 4;
  double intra_prob = 0.05;
  double inter_prob = 0.005;
  // Optional per-block intra probabilities (one per block); overrides intra_prob.
  std::vector<double> block_intra_probs;
  // PowerLaw (preferential attachment)
  std::size_t attach_degree = 2;

  std::size_t feature_dim = 16;
  int num_classes = 4;
  // Block labels the planted community (SBM only).
  LabelSource label_source = LabelSource::Random;
  // Added to feature (label % feature_dim) on top of uniform [0,1) noise. 0 = pure noise.
  double feature_signal = 0.0;
  std::uint64_t seed = 0;
};

/// Deterministic for a given spec. SBM blocks are contiguous id ranges, with
/// the remainder spread over the first blocks. PowerLaw starts from a clique
/// on attach_degree+1 vertices and attaches each new vertex to attach_degree
/// distinct targets chosen proportionally to degree.
Graph generate_graph(const GraphGenSpec& spec);

// ---------------------------------------------------------------------------
// Role masks

enum class Role : std::uint8_t { None, Train, Val, Test };

char role_char(Role r);
Role role_from_char(char c);

struct VertexMasks {
  std::vector<Role> roles;

  std::size_t size() const { return roles.size(); }
  std::size_t count(Role r) const;
  std::vector<VertexId> vertices(Role r) const;
};

struct SplitRatios {
  double train = 0.65;
  double val = 0.10;
  double test = 0.25;
};

/// Disjoint random split; val/test get floor(ratio*n), train gets
/// floor(train*n) plus the rounding remainder (only when ratios sum to 1).
VertexMasks split_masks(std::size_t num_vertices, SplitRatios ratios, std::uint64_t seed);

/// Mask file: one role character per line (T/V/E/N).
VertexMasks read_masks(std::istream& in);
void write_masks(std::ostream& out, const VertexMasks& masks);

}  // namespace gnnwb
