#include "gnnwb/batch.hpp"

#include <algorithm>
#include <cmath>

#include "gnnwb/error.hpp"
#include "gnnwb/random.hpp"

namespace gnnwb {

namespace {

void chunk(std::span<const VertexId> order, std::size_t batch_size, BatchSchedule& out, PartitionId owner) {
  for (std::size_t i = 0; i < order.size(); i += batch_size) {
    const std::size_t end = std::min(order.size(), i + batch_size);
    out.batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(i),
                             order.begin() + static_cast<std::ptrdiff_t>(end));
    out.owners.push_back(owner);
  }
}

}  // namespace

BatchSchedule select_batches(std::span<const VertexId> train, std::size_t batch_size, BatchPolicy policy,
                             const PartitionPlan* clusters, std::uint64_t seed) {
  if (batch_size < 1) throw InputError("batch_size must be >= 1");
  if (train.empty()) throw InputError("cannot batch an empty train set");
  BatchSchedule schedule;
  schedule.policy = policy;
  schedule.batch_size = batch_size;
  schedule.seed = seed;
  Rng gen(derive_seed({seed, 0x6261746368}));

  if (policy == BatchPolicy::Random) {
    std::vector<VertexId> order(train.begin(), train.end());
    seeded_shuffle(std::span<VertexId>(order), gen);
    chunk(order, batch_size, schedule, 0);
    return schedule;
  }

  if (clusters == nullptr) throw InputError("cluster-based batch selection needs a cluster plan");
  const std::size_t needed = (train.size() + batch_size - 1) / batch_size;
  if (clusters->k < needed) {
    throw InputError("cluster-based batch selection needs >= " + std::to_string(needed) + " clusters, plan has " +
                     std::to_string(clusters->k));
  }
  std::vector<std::vector<VertexId>> by_cluster(clusters->k);
  for (VertexId v : train) {
    if (v >= clusters->assignment.size()) throw InputError("train vertex outside cluster plan");
    by_cluster[clusters->owner(v)].push_back(v);
  }
  std::vector<PartitionId> cluster_order(clusters->k);
  for (PartitionId c = 0; c < clusters->k; ++c) cluster_order[c] = c;
  seeded_shuffle(std::span<PartitionId>(cluster_order), gen);
  std::vector<VertexId> order;
  order.reserve(train.size());
  for (PartitionId c : cluster_order) {
    auto& members = by_cluster[c];
    seeded_shuffle(std::span<VertexId>(members), gen);
    order.insert(order.end(), members.begin(), members.end());
  }
  chunk(order, batch_size, schedule, 0);
  return schedule;
}

BatchSchedule select_batches(const VertexMasks& masks, std::size_t batch_size, BatchPolicy policy,
                             const PartitionPlan* clusters, std::uint64_t seed) {
  const auto train = masks.vertices(Role::Train);
  return select_batches(train, batch_size, policy, clusters, seed);
}

BatchSchedule select_cluster_batches(const Graph& g, std::span<const VertexId> train, std::size_t batch_size,
                                     std::uint64_t seed) {
  if (batch_size < 1) throw InputError("batch_size must be >= 1");
  const std::size_t needed = (train.size() + batch_size - 1) / batch_size;
  const auto k = static_cast<std::uint32_t>(std::min<std::size_t>(std::max<std::size_t>(needed, 2), g.num_vertices()));
  const auto clusters = multilevel_partition(g, k, nullptr, BalanceConstraints{}, derive_seed({seed, 0x636c}));
  return select_batches(train, batch_size, BatchPolicy::ClusterBased, &clusters, seed);
}

BatchSchedule select_partitioned_batches(const PartitionPlan& plan, const VertexMasks& masks,
                                         std::size_t batch_size, BatchPolicy policy,
                                         const PartitionPlan* clusters, std::uint64_t seed) {
  BatchSchedule all;
  all.policy = policy;
  all.batch_size = batch_size;
  all.seed = seed;
  std::vector<std::vector<VertexId>> train_of(plan.k);
  for (VertexId v : masks.vertices(Role::Train)) train_of[plan.owner(v)].push_back(v);
  for (PartitionId p = 0; p < plan.k; ++p) {
    if (train_of[p].empty()) continue;
    auto part = select_batches(train_of[p], batch_size, policy, clusters, derive_seed({seed, p}));
    for (auto& b : part.batches) {
      all.batches.push_back(std::move(b));
      all.owners.push_back(p);
    }
  }
  return all;
}

AdaptiveBatchState next_batch_size(AdaptiveBatchState state, double val_acc) {
  if (val_acc > state.best_val_acc + 1e-4) {
    state.best_val_acc = val_acc;
    state.epochs_since_improve = 0;
    return state;
  }
  if (++state.epochs_since_improve >= state.patience) {
    const auto grown = static_cast<std::size_t>(std::llround(static_cast<double>(state.current_batch_size) *
                                                             state.growth_factor));
    state.current_batch_size = std::min(state.max_batch_size, std::max(grown, state.current_batch_size));
    state.epochs_since_improve = 0;
  }
  return state;
}

}  // namespace gnnwb
