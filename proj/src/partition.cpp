#include "gnnwb/partition.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "gnnwb/error.hpp"
#include "gnnwb/random.hpp"

namespace gnnwb {

std::string to_string(PartitionMethod m) {
  switch (m) {
    case PartitionMethod::Hash: return "hash";
    case PartitionMethod::Multilevel: return "multilevel";
    case PartitionMethod::StreamVertex: return "stream-v";
    case PartitionMethod::StreamBlock: return "stream-b";
  }
  return "unknown";
}

bool PartitionPlan::is_resident(VertexId v, PartitionId p) const {
  if (assignment[v] == p) return true;
  if (cache_sets.empty()) return false;
  const auto& c = cache_sets[p];
  return std::binary_search(c.begin(), c.end(), v);
}

std::vector<std::vector<VertexId>> PartitionPlan::members() const {
  std::vector<std::vector<VertexId>> out(k);
  for (std::size_t v = 0; v < assignment.size(); ++v) out[assignment[v]].push_back(static_cast<VertexId>(v));
  return out;
}

std::vector<PartitionCounts> compute_counts(const Graph& g, const VertexMasks* masks,
                                            std::span<const PartitionId> assignment, std::uint32_t k) {
  std::vector<PartitionCounts> counts(k);
  for (std::size_t v = 0; v < assignment.size(); ++v) {
    auto& c = counts[assignment[v]];
    ++c.vertices;
    c.edges += g.degree(static_cast<VertexId>(v));
    if (masks) {
      switch (masks->roles[v]) {
        case Role::Train: ++c.train; break;
        case Role::Val: ++c.val; break;
        case Role::Test: ++c.test; break;
        case Role::None: break;
      }
    }
  }
  return counts;
}

void validate_plan(const Graph& g, const VertexMasks* masks, const PartitionPlan& plan) {
  if (plan.assignment.size() != g.num_vertices()) {
    throw InputError("plan assigns " + std::to_string(plan.assignment.size()) + " vertices, graph has " +
                     std::to_string(g.num_vertices()));
  }
  for (auto p : plan.assignment) {
    if (p >= plan.k) throw InputError("partition id " + std::to_string(p) + " >= k");
  }
  if (compute_counts(g, masks, plan.assignment, plan.k) != plan.counts) {
    throw InputError("stored partition counts disagree with assignment");
  }
}

namespace {

PartitionPlan finish_plan(const Graph& g, const VertexMasks* masks, PartitionMethod method, std::uint32_t k,
                          std::uint64_t seed, std::vector<PartitionId> assignment) {
  PartitionPlan plan;
  plan.method = method;
  plan.k = k;
  plan.seed = seed;
  plan.assignment = std::move(assignment);
  plan.counts = compute_counts(g, masks, plan.assignment, k);
  return plan;
}

void check_k(const Graph& g, std::uint32_t k) {
  if (k < 1) throw InputError("k must be >= 1");
  if (k > g.num_vertices()) {
    throw InputError("k=" + std::to_string(k) + " exceeds vertex count " + std::to_string(g.num_vertices()));
  }
}

}  // namespace

PartitionPlan hash_partition(const Graph& g, std::uint32_t k, std::uint64_t seed, const VertexMasks* masks) {
  check_k(g, k);
  std::vector<VertexId> order(g.num_vertices());
  std::iota(order.begin(), order.end(), VertexId{0});
  Rng gen(derive_seed({seed, 0x68617368}));
  seeded_shuffle(std::span<VertexId>(order), gen);
  std::vector<PartitionId> assignment(g.num_vertices());
  for (std::size_t i = 0; i < order.size(); ++i) assignment[order[i]] = static_cast<PartitionId>(i % k);
  return finish_plan(g, masks, PartitionMethod::Hash, k, seed, std::move(assignment));
}

PartitionPlan round_robin_partition(const Graph& g, std::uint32_t k, const VertexMasks* masks) {
  check_k(g, k);
  std::vector<PartitionId> assignment(g.num_vertices());
  for (std::size_t v = 0; v < assignment.size(); ++v) assignment[v] = static_cast<PartitionId>(v % k);
  return finish_plan(g, masks, PartitionMethod::Hash, k, 0, std::move(assignment));
}

double balance_cap(double total, std::uint32_t k, double tolerance) {
  const double ideal = total / static_cast<double>(k);
  // Integral loads cannot split a unit, so ceil(ideal) is always admissible.
  return std::max(std::floor((1.0 + tolerance) * ideal + 1e-9), std::ceil(ideal - 1e-9));
}

std::vector<VertexId> streaming_order(const VertexMasks& masks, std::uint64_t seed) {
  auto order = masks.vertices(Role::Train);
  Rng gen(derive_seed({seed, 0x73747265616d}));
  seeded_shuffle(std::span<VertexId>(order), gen);
  return order;
}

// ---------------------------------------------------------------------------
// Plan files

void write_plan(std::ostream& out, const PartitionPlan& plan) {
  out << "# method " << to_string(plan.method) << '\n';
  out << "# k " << plan.k << '\n';
  out << "# seed " << plan.seed << '\n';
  out << "# balance_train " << plan.constraints.balance_train << '\n';
  out << "# balance_degree " << plan.constraints.balance_degree << '\n';
  out << "# balance_val_test " << plan.constraints.balance_val_test << '\n';
  out << "# tolerance " << plan.constraints.tolerance << '\n';
  for (auto p : plan.assignment) out << p << '\n';
}

PartitionPlan read_plan(std::istream& in) {
  PartitionPlan plan;
  bool have_k = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ls(line);
    if (line[0] == '#') {
      std::string hash, key;
      ls >> hash >> key;
      if (key == "method") {
        std::string m;
        ls >> m;
        if (m == "hash") plan.method = PartitionMethod::Hash;
        else if (m == "multilevel") plan.method = PartitionMethod::Multilevel;
        else if (m == "stream-v") plan.method = PartitionMethod::StreamVertex;
        else if (m == "stream-b") plan.method = PartitionMethod::StreamBlock;
        else throw InputError("plan line " + std::to_string(line_no) + ": unknown method '" + m + "'");
      } else if (key == "k") {
        ls >> plan.k;
        have_k = true;
      } else if (key == "seed") {
        ls >> plan.seed;
      } else if (key == "balance_train") {
        ls >> plan.constraints.balance_train;
      } else if (key == "balance_degree") {
        ls >> plan.constraints.balance_degree;
      } else if (key == "balance_val_test") {
        ls >> plan.constraints.balance_val_test;
      } else if (key == "tolerance") {
        ls >> plan.constraints.tolerance;
      }
      continue;
    }
    long long p = -1;
    if (!(ls >> p) || p < 0) throw InputError("plan line " + std::to_string(line_no) + ": expected partition id");
    plan.assignment.push_back(static_cast<PartitionId>(p));
  }
  if (!have_k) throw InputError("plan file missing '# k' header");
  for (auto p : plan.assignment) {
    if (p >= plan.k) throw InputError("plan: partition id " + std::to_string(p) + " >= k");
  }
  return plan;
}

}  // namespace gnnwb
