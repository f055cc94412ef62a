#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "gnnwb/graph.hpp"
#include "gnnwb/sampler.hpp"

namespace gnnwb {

/// Dense row-major matrix of doubles.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
  std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }
  std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }
  bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }
};

/// Two-layer GCN weights: W1 is feature_dim x hidden, W2 is hidden x classes.
struct GcnParams {
  Matrix w1;
  Matrix w2;

  /// Glorot-uniform initialisation.
  static GcnParams glorot(std::size_t feature_dim, std::size_t hidden, std::size_t num_classes, std::uint64_t seed);
  static GcnParams zeros_like(const GcnParams& p);

  std::size_t size() const { return w1.data.size() + w2.data.size(); }
  /// Flat view: W1 entries first, then W2.
  double& at(std::size_t i) { return i < w1.data.size() ? w1.data[i] : w2.data[i - w1.data.size()]; }
  double at(std::size_t i) const { return i < w1.data.size() ? w1.data[i] : w2.data[i - w1.data.size()]; }
  double norm() const;
};

using GcnGrads = GcnParams;

/// Activations of one forward pass over a 2-layer sampled subgraph.
///
/// Model layer 1 runs on sampling block 1 (dst = batch plus its sampled
/// neighbors, sources from the input frontier); model layer 2 runs on block 0
/// (dst = batch). Each layer computes sigma(W^T (h_v + mean_{u in S(v)} h_u)),
/// with ReLU after layer 1 and identity before the softmax.
struct ForwardCache {
  std::vector<VertexId> targets;  // batch vertices, one logits row each

  // Layer 1: dst rows of block 1; self and source indices into the frontier.
  std::vector<std::size_t> self1, offsets1, src1;
  Matrix c0;  // h_v + mean neighbor input feature
  Matrix z1;  // c0 * W1
  Matrix h1;  // ReLU(z1)

  // Layer 2: self and source indices into the layer-1 rows.
  std::vector<std::size_t> self2, offsets2, src2;
  Matrix c1;
  Matrix logits;
};

/// Throws InputError when the subgraph does not have exactly two layers or the
/// weights do not fit the graph's feature dimension.
ForwardCache gcn_forward(const Graph& g, const SampledSubgraph& sg, const GcnParams& params);

/// Mean softmax cross-entropy over the targets.
double gcn_loss(const ForwardCache& cache, std::span<const std::int32_t> labels);

/// Gradients of the mean cross-entropy over the targets. `labels` holds one
/// label per target. Throws InputError for an empty batch.
GcnGrads gcn_backward(const ForwardCache& cache, const GcnParams& params, std::span<const std::int32_t> labels);

/// Labels of the subgraph's targets, in target order.
std::vector<std::int32_t> target_labels(const Graph& g, const ForwardCache& cache);

/// Two-layer subgraph over the complete neighborhoods of `targets` (no RNG).
SampledSubgraph full_neighborhood(const Graph& g, std::span<const VertexId> targets);

/// Fraction of the subgraph's targets whose argmax logit (lowest class on
/// ties) equals the label. Pass full_neighborhood() for exact evaluation.
double accuracy(const Graph& g, const SampledSubgraph& full, const GcnParams& params);

using GradientFn =
    std::function<GcnGrads(const ForwardCache&, const GcnParams&, std::span<const std::int32_t> labels)>;

struct GradCheckOptions {
  double eps = 1e-4;
  std::size_t samples = 64;  // parameters probed; all of them when larger than the count
  std::uint64_t seed = 0;
  GradientFn gradient;       // defaults to gcn_backward
};

/// Largest relative error |a - n| / max(|a|, |n|, 1e-8) between analytic and
/// central-difference gradients over a seeded subset of parameters. Probes
/// whose +-eps perturbation flips any layer-1 ReLU are skipped, since the
/// loss is not differentiable across the kink.
double grad_check(const Graph& g, const SampledSubgraph& sg, const GcnParams& params,
                  const GradCheckOptions& options = {});

/// Flat little-endian dump: for each matrix, uint64 rows and cols followed by
/// rows*cols float64 values.
void write_params(std::ostream& out, const GcnParams& params);
GcnParams read_params(std::istream& in);

}  // namespace gnnwb
