#include <algorithm>
#include <array>
#include <charconv>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "gnnwb/error.hpp"
#include "gnnwb/graph.hpp"
#include "gnnwb/random.hpp"

namespace gnnwb {

namespace {

std::string_view strip_comment(std::string_view line) {
  if (auto pos = line.find('#'); pos != std::string_view::npos) line = line.substr(0, pos);
  return line;
}

// Splits on whitespace.
std::vector<std::string_view> tokens(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename T>
T parse_number(std::string_view tok, std::size_t line_no, const char* what) {
  T value{};
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw InputError(std::string(what) + " line " + std::to_string(line_no) + ": non-numeric token '" +
                     std::string(tok) + "'");
  }
  return value;
}

// from_chars for float is available in libstdc++ 11.
float parse_float(std::string_view tok, std::size_t line_no) {
  return parse_number<float>(tok, line_no, "features");
}

std::ifstream open_in(const std::string& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw InputError("cannot open '" + path + "'");
  return in;
}

void put_u32_le(std::ostream& out, std::uint32_t v) {
  std::array<unsigned char, 4> b{static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                                 static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b.data()), 4);
}

std::uint32_t get_u32_le(const unsigned char* b) {
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

}  // namespace

std::vector<Edge> parse_edge_list(std::istream& in) {
  std::vector<Edge> edges;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto toks = tokens(strip_comment(line));
    if (toks.empty()) continue;
    if (toks.size() != 2) {
      throw InputError("edge list line " + std::to_string(line_no) + ": expected 'src dst'");
    }
    edges.push_back({parse_number<VertexId>(toks[0], line_no, "edge list"),
                     parse_number<VertexId>(toks[1], line_no, "edge list")});
  }
  return edges;
}

Graph load_graph(std::istream& edge_stream, const LoadOptions& options, std::istream* feature_stream,
                 std::istream* label_stream) {
  auto edges = parse_edge_list(edge_stream);
  std::size_t n = 0;
  if (options.num_vertices) {
    n = *options.num_vertices;
  } else {
    for (const auto& e : edges) n = std::max<std::size_t>(n, std::max(e.src, e.dst) + std::size_t{1});
  }
  Graph g = Graph::from_edges(n, edges, options.undirected);

  GraphMetadata meta;
  meta.source = "edge-list";
  g = std::move(g).with_metadata(std::move(meta));

  if (feature_stream) {
    auto m = read_features_text(*feature_stream);
    if (m.rows != n) {
      throw InputError("feature row count " + std::to_string(m.rows) + " != num_vertices " + std::to_string(n));
    }
    g = std::move(g).with_features(std::move(m.values), m.cols);
  } else {
    const auto seed = derive_seed({options.seed, 0x666561});
    g = std::move(g).with_features(random_features(n, options.feature_dim, seed), options.feature_dim, seed);
  }

  if (label_stream) {
    auto labels = read_labels(*label_stream);
    int classes = 0;
    for (auto l : labels) classes = std::max(classes, l + 1);
    g = std::move(g).with_labels(std::move(labels), std::max(classes, 1));
  } else {
    const auto seed = derive_seed({options.seed, 0x6c6162});
    g = std::move(g).with_labels(random_labels(n, options.num_classes, seed), options.num_classes, seed);
  }
  return g;
}

Graph load_graph_files(const std::string& edge_path, const LoadOptions& options,
                       const std::string& feature_path, const std::string& label_path) {
  auto edges = open_in(edge_path);
  std::optional<FeatureMatrix> features;
  if (!feature_path.empty()) features = read_features_file(feature_path);

  // Features go through the text path only for streams; splice binary ones in afterwards.
  std::ifstream labels_in;
  if (!label_path.empty()) labels_in = open_in(label_path);
  Graph g = load_graph(edges, options, nullptr, label_path.empty() ? nullptr : &labels_in);
  if (features) {
    if (features->rows != g.num_vertices()) {
      throw InputError("feature row count " + std::to_string(features->rows) + " != num_vertices " +
                       std::to_string(g.num_vertices()));
    }
    g = std::move(g).with_features(std::move(features->values), features->cols);
  }
  return g;
}

FeatureMatrix read_features_text(std::istream& in) {
  FeatureMatrix m;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    auto toks = tokens(strip_comment(line));
    if (toks.empty()) continue;
    if (!have_header) {
      if (toks.size() != 2) throw InputError("features line " + std::to_string(line_no) + ": expected header 'n d'");
      m.rows = parse_number<std::size_t>(toks[0], line_no, "features");
      m.cols = parse_number<std::size_t>(toks[1], line_no, "features");
      m.values.reserve(m.rows * m.cols);
      have_header = true;
      continue;
    }
    if (toks.size() != m.cols) {
      throw InputError("features line " + std::to_string(line_no) + ": expected " + std::to_string(m.cols) +
                       " values, found " + std::to_string(toks.size()));
    }
    for (auto t : toks) m.values.push_back(parse_float(t, line_no));
  }
  if (!have_header) throw InputError("features: missing header");
  if (m.values.size() != m.rows * m.cols) {
    throw InputError("features: header declares " + std::to_string(m.rows) + " rows, found " +
                     std::to_string(m.cols ? m.values.size() / m.cols : 0));
  }
  return m;
}

void write_features_text(std::ostream& out, const FeatureMatrix& m) {
  out << m.rows << ' ' << m.cols << '\n';
  char buf[32];
  for (std::size_t r = 0; r < m.rows; ++r) {
    for (std::size_t c = 0; c < m.cols; ++c) {
      auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), m.values[r * m.cols + c]);
      (void)ec;
      if (c) out << ' ';
      out.write(buf, end - buf);
    }
    out << '\n';
  }
}

FeatureMatrix read_features_binary(const std::string& path) {
  auto desc = open_in(path + ".desc", std::ios::binary);
  std::array<unsigned char, 8> header{};
  if (!desc.read(reinterpret_cast<char*>(header.data()), 8)) {
    throw InputError("'" + path + ".desc': expected 8-byte (n, d) header");
  }
  FeatureMatrix m;
  m.rows = get_u32_le(header.data());
  m.cols = get_u32_le(header.data() + 4);
  m.values.resize(m.rows * m.cols);

  auto in = open_in(path, std::ios::binary);
  std::vector<unsigned char> raw(m.values.size() * 4);
  if (!in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()))) {
    throw InputError("'" + path + "': shorter than declared " + std::to_string(m.rows) + "x" +
                     std::to_string(m.cols) + " matrix");
  }
  for (std::size_t i = 0; i < m.values.size(); ++i) {
    std::uint32_t bits = get_u32_le(raw.data() + 4 * i);
    std::memcpy(&m.values[i], &bits, 4);
  }
  return m;
}

void write_features_binary(const std::string& path, const FeatureMatrix& m) {
  std::ofstream desc(path + ".desc", std::ios::binary);
  put_u32_le(desc, static_cast<std::uint32_t>(m.rows));
  put_u32_le(desc, static_cast<std::uint32_t>(m.cols));
  std::ofstream out(path, std::ios::binary);
  for (float x : m.values) {
    std::uint32_t bits;
    std::memcpy(&bits, &x, 4);
    put_u32_le(out, bits);
  }
  if (!out || !desc) throw InputError("failed writing '" + path + "'");
}

FeatureMatrix read_features_file(const std::string& path) {
  if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".bin") == 0) return read_features_binary(path);
  auto in = open_in(path);
  return read_features_text(in);
}

std::vector<std::int32_t> read_labels(std::istream& in) {
  std::vector<std::int32_t> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto toks = tokens(strip_comment(line));
    if (toks.empty()) continue;
    if (toks.size() != 1) throw InputError("labels line " + std::to_string(line_no) + ": expected one integer");
    auto l = parse_number<std::int32_t>(toks[0], line_no, "labels");
    if (l < 0) throw InputError("labels line " + std::to_string(line_no) + ": negative label");
    out.push_back(l);
  }
  return out;
}

VertexMasks read_masks(std::istream& in) {
  VertexMasks masks;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto toks = tokens(line);
    if (toks.empty()) continue;
    if (toks.size() != 1 || toks[0].size() != 1) {
      throw InputError("mask line " + std::to_string(line_no) + ": expected one of T/V/E/N");
    }
    masks.roles.push_back(role_from_char(toks[0][0]));
  }
  return masks;
}

void write_masks(std::ostream& out, const VertexMasks& masks) {
  for (Role r : masks.roles) out << role_char(r) << '\n';
}

}  // namespace gnnwb
