#include "gnnwb/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include "gnnwb/error.hpp"
#include "gnnwb/random.hpp"

namespace gnnwb {

void SamplerConfig::validate() const {
  const bool needs_fanout = method != SampleMethod::Rate;
  const bool needs_rate = method != SampleMethod::Fanout;
  if (needs_fanout && fanouts.size() != num_layers) {
    throw InputError("sampler: " + std::to_string(fanouts.size()) + " fanouts for " + std::to_string(num_layers) +
                     " layers");
  }
  if (needs_rate) {
    if (rates.size() != num_layers) {
      throw InputError("sampler: " + std::to_string(rates.size()) + " rates for " + std::to_string(num_layers) +
                       " layers");
    }
    for (double r : rates) {
      if (!(r > 0.0 && r <= 1.0)) throw InputError("sampler: rates must lie in (0, 1]");
    }
  }
  if (method == SampleMethod::Hybrid && degree_threshold && *degree_threshold < 1.0) {
    throw InputError("sampler: hybrid degree threshold must be >= 1");
  }
}

double SamplerConfig::resolved_threshold(const Graph& g) const {
  return degree_threshold ? *degree_threshold : g.mean_degree();
}

std::size_t sample_count(const SamplerConfig& config, std::size_t layer, std::size_t degree, double tau) {
  if (degree == 0) return 0;
  auto by_fanout = [&] { return std::min(config.fanouts[layer], degree); };
  auto by_rate = [&] {
    // The epsilon keeps products like 0.1 * 20 from rounding up to 3.
    const auto want = static_cast<std::size_t>(std::ceil(config.rates[layer] * static_cast<double>(degree) - 1e-9));
    return std::clamp<std::size_t>(want, 1, degree);
  };
  switch (config.method) {
    case SampleMethod::Fanout: return by_fanout();
    case SampleMethod::Rate: return by_rate();
    case SampleMethod::Hybrid: return static_cast<double>(degree) <= tau ? by_fanout() : by_rate();
  }
  return 0;
}

std::size_t SampledSubgraph::sampled_edges() const {
  std::size_t total = 0;
  for (const auto& l : layers) total += l.num_edges();
  return total;
}

std::span<const VertexId> SampledSubgraph::batch() const {
  if (layers.empty()) return input_frontier;
  return layers.front().dst;
}

LayerBlock sample_layer(const Graph& g, std::span<const VertexId> dst, std::size_t layer,
                        const SamplerConfig& config, SampleKey key, double tau) {
  LayerBlock block;
  block.dst.assign(dst.begin(), dst.end());
  block.offsets.reserve(dst.size() + 1);
  std::vector<VertexId> scratch;
  for (VertexId v : dst) {
    const auto nb = g.neighbors(v);
    const std::size_t want = sample_count(config, layer, nb.size(), tau);
    const std::size_t begin = block.src.size();
    if (want >= nb.size()) {
      block.src.insert(block.src.end(), nb.begin(), nb.end());
    } else {
      // Partial Fisher-Yates over a copy of the neighbor slice.
      scratch.assign(nb.begin(), nb.end());
      StreamRng rng(derive_seed({key.seed, key.epoch, key.batch, layer, v}));
      for (std::size_t i = 0; i < want; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, scratch.size() - 1);
        std::swap(scratch[i], scratch[pick(rng)]);
      }
      std::sort(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(want));
      block.src.insert(block.src.end(), scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(want));
    }
    (void)begin;
    block.offsets.push_back(block.src.size());
  }
  return block;
}

SampledSubgraph sample_subgraph(const Graph& g, std::span<const VertexId> batch, const SamplerConfig& config,
                                SampleKey key) {
  for (VertexId v : batch) {
    if (v >= g.num_vertices()) throw InputError("batch vertex " + std::to_string(v) + " out of range");
  }
  SampledSubgraph sg;
  sg.batch_index = key.batch;
  const double tau = config.method == SampleMethod::Hybrid ? config.resolved_threshold(g) : 0.0;
  std::vector<VertexId> dst(batch.begin(), batch.end());
  for (std::size_t l = 0; l < config.num_layers; ++l) {
    LayerBlock block = sample_layer(g, dst, l, config, key, tau);
    std::vector<VertexId> next(block.dst.begin(), block.dst.end());
    next.insert(next.end(), block.src.begin(), block.src.end());
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    sg.layers.push_back(std::move(block));
    dst = std::move(next);
  }
  if (config.num_layers == 0) {
    std::sort(dst.begin(), dst.end());
    dst.erase(std::unique(dst.begin(), dst.end()), dst.end());
  }
  sg.input_frontier = std::move(dst);
  return sg;
}

// ---------------------------------------------------------------------------
// Dump format

void write_subgraph_dump(std::ostream& out, std::span<const SampledSubgraph> epoch) {
  out << "gnnwb-subgraphs 1 " << epoch.size() << '\n';
  for (const auto& sg : epoch) {
    out << "batch " << sg.batch_index << ' ' << sg.owner << ' ' << sg.layers.size() << '\n';
    out << "frontier " << sg.input_frontier.size();
    for (auto v : sg.input_frontier) out << ' ' << v;
    out << '\n';
    for (std::size_t l = 0; l < sg.layers.size(); ++l) {
      const auto& block = sg.layers[l];
      out << "layer " << l << ' ' << block.dst.size() << ' ' << block.num_edges() << '\n';
      for (std::size_t i = 0; i < block.dst.size(); ++i) {
        const auto s = block.sampled(i);
        out << block.dst[i] << ' ' << s.size();
        for (auto u : s) out << ' ' << u;
        out << '\n';
      }
    }
  }
}

namespace {

struct DumpReader {
  std::istream& in;
  std::size_t line_no = 0;

  std::istringstream next(const char* expect) {
    std::string line;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty()) break;
    }
    if (line.empty()) throw InputError(std::string("subgraph dump: unexpected end, wanted '") + expect + "'");
    std::istringstream ls(line);
    if (*expect) {
      std::string tag;
      ls >> tag;
      if (tag != expect) fail(std::string("expected '") + expect + "'");
    }
    return ls;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw InputError("subgraph dump line " + std::to_string(line_no) + ": " + what);
  }

  template <typename T>
  T read(std::istringstream& ls) {
    T value{};
    if (!(ls >> value)) fail("malformed number");
    return value;
  }
};

}  // namespace

std::vector<SampledSubgraph> read_subgraph_dump(std::istream& in) {
  DumpReader r{in};
  auto header = r.next("gnnwb-subgraphs");
  if (r.read<int>(header) != 1) r.fail("unsupported version");
  const auto count = r.read<std::size_t>(header);
  std::vector<SampledSubgraph> epoch(count);
  for (auto& sg : epoch) {
    auto b = r.next("batch");
    sg.batch_index = r.read<std::uint64_t>(b);
    sg.owner = r.read<PartitionId>(b);
    const auto layers = r.read<std::size_t>(b);
    auto f = r.next("frontier");
    sg.input_frontier.resize(r.read<std::size_t>(f));
    for (auto& v : sg.input_frontier) v = r.read<VertexId>(f);
    for (std::size_t l = 0; l < layers; ++l) {
      auto lh = r.next("layer");
      if (r.read<std::size_t>(lh) != l) r.fail("layers out of order");
      LayerBlock block;
      const auto ndst = r.read<std::size_t>(lh);
      const auto nedges = r.read<std::size_t>(lh);
      for (std::size_t i = 0; i < ndst; ++i) {
        auto row = r.next("");
        block.dst.push_back(r.read<VertexId>(row));
        const auto deg = r.read<std::size_t>(row);
        for (std::size_t j = 0; j < deg; ++j) block.src.push_back(r.read<VertexId>(row));
        block.offsets.push_back(block.src.size());
      }
      if (block.num_edges() != nedges) r.fail("edge count mismatch");
      sg.layers.push_back(std::move(block));
    }
  }
  return epoch;
}

}  // namespace gnnwb
