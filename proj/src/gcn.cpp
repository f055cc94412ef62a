#include "gnnwb/gcn.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>

#include "gnnwb/error.hpp"
#include "gnnwb/random.hpp"

namespace gnnwb {

GcnParams GcnParams::glorot(std::size_t feature_dim, std::size_t hidden, std::size_t num_classes,
                            std::uint64_t seed) {
  if (feature_dim == 0 || hidden == 0 || num_classes == 0) throw InputError("gcn: zero-sized layer");
  GcnParams p{Matrix(feature_dim, hidden), Matrix(hidden, num_classes)};
  Rng gen(derive_seed({seed, 0x676c6f726f74}));
  auto fill = [&](Matrix& m) {
    const double a = std::sqrt(6.0 / static_cast<double>(m.rows + m.cols));
    std::uniform_real_distribution<double> u(-a, a);
    for (auto& x : m.data) x = u(gen);
  };
  fill(p.w1);
  fill(p.w2);
  return p;
}

GcnParams GcnParams::zeros_like(const GcnParams& p) {
  return {Matrix(p.w1.rows, p.w1.cols), Matrix(p.w2.rows, p.w2.cols)};
}

double GcnParams::norm() const {
  double s = 0.0;
  for (double x : w1.data) s += x * x;
  for (double x : w2.data) s += x * x;
  return std::sqrt(s);
}

namespace {

std::size_t index_of(std::span<const VertexId> sorted, VertexId v) {
  auto it = std::lower_bound(sorted.begin(), sorted.end(), v);
  if (it == sorted.end() || *it != v) throw InputError("gcn: subgraph vertex " + std::to_string(v) + " missing from its input rows");
  return static_cast<std::size_t>(it - sorted.begin());
}

// out = a * b
Matrix matmul(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows, b.cols);
  const auto rows = static_cast<std::ptrdiff_t>(a.rows);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < rows; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    auto o = out.row(i);
    for (std::size_t k = 0; k < a.cols; ++k) {
      const double x = a(i, k);
      if (x == 0.0) continue;
      const auto br = b.row(k);
      for (std::size_t j = 0; j < b.cols; ++j) o[j] += x * br[j];
    }
  }
  return out;
}

// out = a^T * b, each entry summed over rows in index order.
Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  Matrix out(a.cols, b.cols);
  const auto rows = static_cast<std::ptrdiff_t>(a.cols);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t kk = 0; kk < rows; ++kk) {
    const auto k = static_cast<std::size_t>(kk);
    auto o = out.row(k);
    for (std::size_t i = 0; i < a.rows; ++i) {
      const double x = a(i, k);
      if (x == 0.0) continue;
      const auto br = b.row(i);
      for (std::size_t j = 0; j < b.cols; ++j) o[j] += x * br[j];
    }
  }
  return out;
}

// out = a * b^T
Matrix matmul_nt(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows, b.rows);
  const auto rows = static_cast<std::ptrdiff_t>(a.rows);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < rows; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    const auto ar = a.row(i);
    for (std::size_t j = 0; j < b.rows; ++j) {
      const auto br = b.row(j);
      double s = 0.0;
      for (std::size_t k = 0; k < a.cols; ++k) s += ar[k] * br[k];
      out(i, j) = s;
    }
  }
  return out;
}

// Row i of the result is in(self[i]) + mean of in(src[offsets[i] .. offsets[i+1])).
Matrix combine(const Matrix& in, std::span<const std::size_t> self, std::span<const std::size_t> offsets,
               std::span<const std::size_t> src) {
  Matrix out(self.size(), in.cols);
  const auto rows = static_cast<std::ptrdiff_t>(self.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < rows; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    auto o = out.row(i);
    const std::size_t begin = offsets[i], end = offsets[i + 1];
    if (end > begin) {
      for (std::size_t e = begin; e < end; ++e) {
        const auto r = in.row(src[e]);
        for (std::size_t j = 0; j < in.cols; ++j) o[j] += r[j];
      }
      const double inv = 1.0 / static_cast<double>(end - begin);
      for (auto& x : o) x *= inv;
    }
    const auto s = in.row(self[i]);
    for (std::size_t j = 0; j < in.cols; ++j) o[j] += s[j];
  }
  return out;
}

void index_block(const LayerBlock& block, std::span<const VertexId> rows, std::vector<std::size_t>& self,
                 std::vector<std::size_t>& offsets, std::vector<std::size_t>& src) {
  self.clear();
  src.clear();
  offsets.assign(1, 0);
  for (std::size_t i = 0; i < block.dst.size(); ++i) {
    self.push_back(index_of(rows, block.dst[i]));
    for (VertexId u : block.sampled(i)) src.push_back(index_of(rows, u));
    offsets.push_back(src.size());
  }
}

std::vector<double> softmax_row(std::span<const double> z) {
  const double mx = *std::max_element(z.begin(), z.end());
  std::vector<double> p(z.size());
  double s = 0.0;
  for (std::size_t c = 0; c < z.size(); ++c) s += p[c] = std::exp(z[c] - mx);
  for (auto& x : p) x /= s;
  return p;
}

void check_labels(const ForwardCache& cache, std::span<const std::int32_t> labels) {
  if (cache.targets.empty()) throw InputError("gcn: empty batch");
  if (labels.size() != cache.targets.size()) throw InputError("gcn: one label per target required");
  for (auto y : labels) {
    if (y < 0 || static_cast<std::size_t>(y) >= cache.logits.cols) throw InputError("gcn: label out of range");
  }
}

}  // namespace

ForwardCache gcn_forward(const Graph& g, const SampledSubgraph& sg, const GcnParams& params) {
  if (sg.layers.size() != 2) throw InputError("gcn: expected a 2-layer sampled subgraph");
  if (params.w1.rows != g.feature_dim()) throw InputError("gcn: W1 rows do not match feature_dim");
  if (params.w2.rows != params.w1.cols) throw InputError("gcn: W2 rows do not match hidden size");

  const auto& frontier = sg.input_frontier;
  Matrix x(frontier.size(), g.feature_dim());
  for (std::size_t i = 0; i < frontier.size(); ++i) {
    const auto f = g.features(frontier[i]);
    std::copy(f.begin(), f.end(), x.row(i).begin());
  }

  ForwardCache c;
  const LayerBlock& b1 = sg.layers[1];
  const LayerBlock& b0 = sg.layers[0];
  c.targets = b0.dst;
  index_block(b1, frontier, c.self1, c.offsets1, c.src1);
  c.c0 = combine(x, c.self1, c.offsets1, c.src1);
  c.z1 = matmul(c.c0, params.w1);
  c.h1 = c.z1;
  for (auto& v : c.h1.data) v = std::max(v, 0.0);

  // Layer-2 inputs are the layer-1 outputs, one per block-1 dst (sorted).
  index_block(b0, b1.dst, c.self2, c.offsets2, c.src2);
  c.c1 = combine(c.h1, c.self2, c.offsets2, c.src2);
  c.logits = matmul(c.c1, params.w2);
  return c;
}

double gcn_loss(const ForwardCache& cache, std::span<const std::int32_t> labels) {
  check_labels(cache, labels);
  double loss = 0.0;
  for (std::size_t i = 0; i < cache.targets.size(); ++i) {
    const auto z = cache.logits.row(i);
    const double mx = *std::max_element(z.begin(), z.end());
    double s = 0.0;
    for (double v : z) s += std::exp(v - mx);
    loss += std::log(s) + mx - z[static_cast<std::size_t>(labels[i])];
  }
  return loss / static_cast<double>(cache.targets.size());
}

GcnGrads gcn_backward(const ForwardCache& cache, const GcnParams& params, std::span<const std::int32_t> labels) {
  check_labels(cache, labels);
  const std::size_t batch = cache.targets.size();
  Matrix dlogits(batch, cache.logits.cols);
  for (std::size_t i = 0; i < batch; ++i) {
    auto p = softmax_row(cache.logits.row(i));
    p[static_cast<std::size_t>(labels[i])] -= 1.0;
    for (std::size_t c = 0; c < p.size(); ++c) dlogits(i, c) = p[c] / static_cast<double>(batch);
  }

  GcnGrads grads;
  grads.w2 = matmul_tn(cache.c1, dlogits);
  const Matrix dc1 = matmul_nt(dlogits, params.w2);

  // Scatter back through the layer-2 combine; serial so the sum order is fixed.
  Matrix dz1(cache.h1.rows, cache.h1.cols);
  for (std::size_t i = 0; i < batch; ++i) {
    const auto d = dc1.row(i);
    auto self = dz1.row(cache.self2[i]);
    for (std::size_t j = 0; j < d.size(); ++j) self[j] += d[j];
    const std::size_t begin = cache.offsets2[i], end = cache.offsets2[i + 1];
    if (end == begin) continue;
    const double inv = 1.0 / static_cast<double>(end - begin);
    for (std::size_t e = begin; e < end; ++e) {
      auto r = dz1.row(cache.src2[e]);
      for (std::size_t j = 0; j < d.size(); ++j) r[j] += d[j] * inv;
    }
  }
  for (std::size_t k = 0; k < dz1.data.size(); ++k) {
    if (cache.z1.data[k] <= 0.0) dz1.data[k] = 0.0;
  }
  grads.w1 = matmul_tn(cache.c0, dz1);
  return grads;
}

std::vector<std::int32_t> target_labels(const Graph& g, const ForwardCache& cache) {
  std::vector<std::int32_t> out;
  out.reserve(cache.targets.size());
  for (VertexId v : cache.targets) out.push_back(g.label(v));
  return out;
}

SampledSubgraph full_neighborhood(const Graph& g, std::span<const VertexId> targets) {
  SamplerConfig all;
  all.method = SampleMethod::Fanout;
  all.num_layers = 2;
  const std::size_t cap = std::max<std::size_t>(g.max_degree(), 1);
  all.fanouts = {cap, cap};
  return sample_subgraph(g, targets, all, SampleKey{});
}

double accuracy(const Graph& g, const SampledSubgraph& full, const GcnParams& params) {
  if (full.batch().empty()) return 0.0;
  const auto cache = gcn_forward(g, full, params);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < cache.targets.size(); ++i) {
    const auto z = cache.logits.row(i);
    const auto pred = static_cast<std::int32_t>(std::max_element(z.begin(), z.end()) - z.begin());
    if (pred == g.label(cache.targets[i])) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(cache.targets.size());
}

double grad_check(const Graph& g, const SampledSubgraph& sg, const GcnParams& params,
                  const GradCheckOptions& options) {
  const auto base = gcn_forward(g, sg, params);
  const auto labels = target_labels(g, base);
  const GcnGrads analytic = options.gradient ? options.gradient(base, params, labels) : gcn_backward(base, params, labels);
  if (analytic.size() != params.size()) throw InputError("grad_check: gradient has the wrong number of entries");

  std::vector<std::size_t> probe(params.size());
  for (std::size_t i = 0; i < probe.size(); ++i) probe[i] = i;
  if (options.samples < probe.size()) {
    Rng gen(derive_seed({options.seed, 0x6772616463}));
    seeded_shuffle(std::span<std::size_t>(probe), gen);
    probe.resize(options.samples);
  }

  auto same_pattern = [&](const ForwardCache& c) {
    for (std::size_t k = 0; k < c.z1.data.size(); ++k) {
      if ((c.z1.data[k] > 0.0) != (base.z1.data[k] > 0.0)) return false;
    }
    return true;
  };

  double worst = 0.0;
  GcnParams p = params;
  for (std::size_t i : probe) {
    const double orig = p.at(i);
    p.at(i) = orig + options.eps;
    const auto plus = gcn_forward(g, sg, p);
    p.at(i) = orig - options.eps;
    const auto minus = gcn_forward(g, sg, p);
    p.at(i) = orig;
    if (!same_pattern(plus) || !same_pattern(minus)) continue;
    const double numeric = (gcn_loss(plus, labels) - gcn_loss(minus, labels)) / (2.0 * options.eps);
    const double a = analytic.at(i);
    const double denom = std::max({std::abs(a), std::abs(numeric), 1e-8});
    worst = std::max(worst, std::abs(a - numeric) / denom);
  }
  return worst;
}

namespace {

template <typename T>
void put(std::ostream& out, T value) {
  static_assert(std::endian::native == std::endian::little, "parameter dumps assume a little-endian host");
  out.write(reinterpret_cast<const char*>(&value), sizeof value);
}

template <typename T>
T get(std::istream& in) {
  T value{};
  if (!in.read(reinterpret_cast<char*>(&value), sizeof value)) throw InputError("parameter dump truncated");
  return value;
}

}  // namespace

void write_params(std::ostream& out, const GcnParams& params) {
  for (const Matrix* m : {&params.w1, &params.w2}) {
    put<std::uint64_t>(out, m->rows);
    put<std::uint64_t>(out, m->cols);
    for (double x : m->data) put(out, x);
  }
}

GcnParams read_params(std::istream& in) {
  GcnParams p;
  for (Matrix* m : {&p.w1, &p.w2}) {
    const auto rows = get<std::uint64_t>(in);
    const auto cols = get<std::uint64_t>(in);
    if (rows > (1u << 24) || cols > (1u << 24)) throw InputError("parameter dump has an implausible shape");
    *m = Matrix(rows, cols);
    for (auto& x : m->data) x = get<double>(in);
  }
  if (p.w2.rows != p.w1.cols) throw InputError("parameter dump shapes are inconsistent");
  return p;
}

}  // namespace gnnwb
