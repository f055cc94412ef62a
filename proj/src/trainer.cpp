#include "gnnwb/trainer.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>

#include "gnnwb/error.hpp"
#include "gnnwb/kernels.hpp"
#include "gnnwb/random.hpp"

namespace gnnwb {

Optimizer::Optimizer(OptimizerKind kind, double lr) : kind_(kind), lr_(lr) {
  if (!(lr >= 0.0)) throw InputError("learning rate must be >= 0");
}

void Optimizer::step(GcnParams& params, const GcnGrads& grads) {
  const std::size_t n = params.size();
  if (kind_ == OptimizerKind::SGD) {
    for (std::size_t i = 0; i < n; ++i) params.at(i) -= lr_ * grads.at(i);
    return;
  }
  constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
  if (m_.size() != n) {
    m_.assign(n, 0.0);
    v_.assign(n, 0.0);
  }
  ++t_;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  for (std::size_t i = 0; i < n; ++i) {
    const double g = grads.at(i);
    m_[i] = b1 * m_[i] + (1 - b1) * g;
    v_[i] = b2 * v_[i] + (1 - b2) * g * g;
    params.at(i) -= lr_ * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + eps);
  }
}

std::uint64_t TrainLog::total_sampled_edges() const {
  std::uint64_t total = 0;
  for (const auto& e : epochs) total += e.sampled_edges;
  return total;
}

TrainLog train(const Graph& g, const VertexMasks& masks, const TrainConfig& config) {
  if (config.sampler.num_layers != 2) throw InputError("training needs a 2-layer sampler");
  config.sampler.validate();
  if (masks.size() != g.num_vertices()) throw InputError("mask size does not match graph");
  if (g.num_classes() < 1) throw InputError("graph has no labels");
  if (config.adaptive) {
    const auto& a = *config.adaptive;
    if (a.current_batch_size < 1 || a.current_batch_size > a.max_batch_size || !(a.growth_factor > 1.0)) {
      throw InputError("adaptive batch state needs 1 <= current <= max and growth_factor > 1");
    }
  }
  const auto train_ids = masks.vertices(Role::Train);
  const auto val_ids = masks.vertices(Role::Val);
  if (train_ids.empty()) throw InputError("training needs train vertices");

  TrainLog log;
  log.params = GcnParams::glorot(g.feature_dim(), config.hidden, static_cast<std::size_t>(g.num_classes()),
                                 derive_seed({config.seed, 0x696e6974}));
  Optimizer opt(config.optimizer, config.lr);
  const auto val_graph = full_neighborhood(g, val_ids);
  auto val_accuracy = [&] { return val_ids.empty() ? 0.0 : accuracy(g, val_graph, log.params); };

  std::optional<AdaptiveBatchState> adaptive = config.adaptive;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    EpochLog e;
    e.epoch = epoch;
    e.batch_size = adaptive ? adaptive->current_batch_size : config.batch_size;
    const std::uint64_t seed = derive_seed({config.seed, 0x65706f6368, epoch});
    const auto schedule = config.policy == BatchPolicy::ClusterBased
                              ? select_cluster_batches(g, train_ids, e.batch_size, seed)
                              : select_batches(train_ids, e.batch_size, BatchPolicy::Random, nullptr, seed);
    const auto subgraphs = kernels::sample_epoch(g, schedule, config.sampler, config.seed, epoch);
    for (const auto& sg : subgraphs) {
      const auto cache = gcn_forward(g, sg, log.params);
      const auto labels = target_labels(g, cache);
      e.loss += gcn_loss(cache, labels);
      const auto grads = gcn_backward(cache, log.params, labels);
      e.grad_norm += grads.norm();
      opt.step(log.params, grads);
      ++e.updates;
      ++log.total_updates;
      e.sampled_vertices += sg.sampled_vertices();
      e.sampled_edges += sg.sampled_edges();
      if (config.target_val_acc && !log.updates_to_target && val_accuracy() >= *config.target_val_acc) {
        log.updates_to_target = log.total_updates;
      }
    }
    e.loss /= static_cast<double>(e.updates);
    e.grad_norm /= static_cast<double>(e.updates);
    e.val_acc = val_accuracy();
    if (adaptive) adaptive = next_batch_size(*adaptive, e.val_acc);
    e.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    log.epochs.push_back(e);
  }
  return log;
}

void write_train_csv(std::ostream& out, const TrainLog& log, bool include_time) {
  out << "epoch,loss,val_acc,batch_size,updates,sampled_v,sampled_e,grad_norm,time\n";
  out << std::setprecision(10);
  for (const auto& e : log.epochs) {
    out << e.epoch << ',' << e.loss << ',' << e.val_acc << ',' << e.batch_size << ',' << e.updates << ','
        << e.sampled_vertices << ',' << e.sampled_edges << ',' << e.grad_norm << ','
        << (include_time ? e.seconds : 0.0) << '\n';
  }
}

}  // namespace gnnwb
