#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "gnnwb/batch.hpp"
#include "gnnwb/gcn.hpp"
#include "gnnwb/graph.hpp"
#include "gnnwb/sampler.hpp"

namespace gnnwb {

enum class OptimizerKind { SGD, Adam };

/// SGD or Adam (beta1 0.9, beta2 0.999, eps 1e-8) over GcnParams.
class Optimizer {
 public:
  Optimizer(OptimizerKind kind, double lr);
  void step(GcnParams& params, const GcnGrads& grads);

 private:
  OptimizerKind kind_;
  double lr_;
  std::uint64_t t_ = 0;
  std::vector<double> m_, v_;
};

struct TrainConfig {
  std::size_t epochs = 50;
  OptimizerKind optimizer = OptimizerKind::SGD;
  double lr = 0.1;
  std::size_t hidden = 128;
  // Fixed batch size, used when `adaptive` is unset.
  std::size_t batch_size = 512;
  std::optional<AdaptiveBatchState> adaptive;
  BatchPolicy policy = BatchPolicy::Random;
  SamplerConfig sampler;
  std::uint64_t seed = 0;
  // When set, validation accuracy is also measured after every update until
  // it first reaches this value, and the update count is recorded.
  std::optional<double> target_val_acc;
};

struct EpochLog {
  std::size_t epoch = 0;
  double loss = 0.0;  // mean batch loss over the epoch
  double val_acc = 0.0;
  std::size_t batch_size = 0;
  std::size_t updates = 0;  // parameter updates this epoch (= batches)
  std::uint64_t sampled_vertices = 0;
  std::uint64_t sampled_edges = 0;
  double grad_norm = 0.0;  // mean gradient norm over the epoch's batches
  double seconds = 0.0;
};

struct TrainLog {
  std::vector<EpochLog> epochs;
  std::size_t total_updates = 0;
  std::optional<std::size_t> updates_to_target;
  GcnParams params;

  double final_val_acc() const { return epochs.empty() ? 0.0 : epochs.back().val_acc; }
  std::uint64_t total_sampled_edges() const;
};

/// Mini-batch training of the 2-layer GCN on the train mask; validation
/// accuracy uses full neighborhoods of the val mask. Deterministic per seed
/// (wall times aside).
TrainLog train(const Graph& g, const VertexMasks& masks, const TrainConfig& config);

/// CSV columns: epoch,loss,val_acc,batch_size,updates,sampled_v,sampled_e,
/// grad_norm,time. With include_time false the time column is written as 0 so
/// reruns are byte-identical.
void write_train_csv(std::ostream& out, const TrainLog& log, bool include_time);

}  // namespace gnnwb
