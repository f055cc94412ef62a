// Multilevel k-way edge-cut partitioning with multi-constraint balance.
//
// Coarsening uses heavy-edge matching in a seeded random visit order until the
// graph has at most max(4k, 64) vertices or stops shrinking. The coarsest graph
// is partitioned by greedy region growing (several seeded tries); each level is
// then refined with boundary FM passes. A pass may overshoot a cap by at most
// one vertex weight so that tight bisections can still swap vertices, and it
// rolls back to the best prefix that is no less balanced than where it
// started. A separate rebalancing step repairs cap violations, moving the
// cheapest vertices that strictly reduce total overload.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>
#include <string>
#include <tuple>

#include "gnnwb/error.hpp"
#include "gnnwb/partition.hpp"
#include "gnnwb/random.hpp"

namespace gnnwb {

namespace {

using Weight = std::int64_t;

struct Level {
  std::size_t n = 0;
  std::vector<std::size_t> xadj{0};
  std::vector<std::uint32_t> adj;
  std::vector<Weight> ew;
  std::vector<Weight> vw;  // n * ncon, row-major
  std::vector<std::uint32_t> to_coarse;  // filled when this level is coarsened
};

struct Balance {
  std::uint32_t k;
  int ncon;
  std::vector<double> cap;   // ncon
  std::vector<Weight> load;  // k * ncon
  std::vector<Weight> slack; // ncon; temporary overshoot allowed during FM

  Weight& at(PartitionId p, int d) { return load[static_cast<std::size_t>(p) * ncon + d]; }
  Weight at(PartitionId p, int d) const { return load[static_cast<std::size_t>(p) * ncon + d]; }

  void reset(const Level& g, std::span<const PartitionId> part) {
    load.assign(static_cast<std::size_t>(k) * ncon, 0);
    slack.assign(ncon, 0);
    for (std::size_t v = 0; v < g.n; ++v) {
      for (int d = 0; d < ncon; ++d) {
        at(part[v], d) += g.vw[v * ncon + d];
        slack[d] = std::max(slack[d], g.vw[v * ncon + d]);
      }
    }
  }

  // True when v (weights w) fits into q without exceeding a cap (plus the FM
  // slack when `relaxed`) in any dimension it contributes to.
  bool fits(const Weight* w, PartitionId q, bool relaxed = false) const {
    for (int d = 0; d < ncon; ++d) {
      const double limit = cap[d] + (relaxed ? static_cast<double>(slack[d]) : 0.0);
      if (w[d] != 0 && static_cast<double>(at(q, d) + w[d]) > limit) return false;
    }
    return true;
  }

  double overload(PartitionId p, int d, Weight extra = 0) const {
    double over = static_cast<double>(at(p, d) + extra) - cap[d];
    return over > 0 ? over / std::max(cap[d], 1.0) : 0.0;
  }

  double violation() const {
    double total = 0;
    for (PartitionId p = 0; p < k; ++p)
      for (int d = 0; d < ncon; ++d) total += overload(p, d);
    return total;
  }

  // Change in total violation if w moves from p to q.
  double move_delta(const Weight* w, PartitionId p, PartitionId q) const {
    double delta = 0;
    for (int d = 0; d < ncon; ++d) {
      if (w[d] == 0) continue;
      delta += overload(p, d, -w[d]) - overload(p, d) + overload(q, d, w[d]) - overload(q, d);
    }
    return delta;
  }

  void move(const Weight* w, PartitionId p, PartitionId q) {
    for (int d = 0; d < ncon; ++d) {
      at(p, d) -= w[d];
      at(q, d) += w[d];
    }
  }
};

Weight cut_of(const Level& g, std::span<const PartitionId> part) {
  Weight cut = 0;
  for (std::size_t v = 0; v < g.n; ++v) {
    for (std::size_t e = g.xadj[v]; e < g.xadj[v + 1]; ++e) {
      if (g.adj[e] > v && part[g.adj[e]] != part[v]) cut += g.ew[e];
    }
  }
  return cut;
}

// Connection weight of v to every partition.
void connections(const Level& g, std::span<const PartitionId> part, std::size_t v, std::vector<Weight>& conn) {
  std::fill(conn.begin(), conn.end(), 0);
  for (std::size_t e = g.xadj[v]; e < g.xadj[v + 1]; ++e) conn[part[g.adj[e]]] += g.ew[e];
}

// ---------------------------------------------------------------------------
// Coarsening

Level contract(const Level& fine, int ncon, std::span<const std::uint32_t> match, std::vector<std::uint32_t>& map) {
  map.assign(fine.n, std::numeric_limits<std::uint32_t>::max());
  std::uint32_t next = 0;
  for (std::size_t v = 0; v < fine.n; ++v) {
    if (map[v] != std::numeric_limits<std::uint32_t>::max()) continue;
    map[v] = next;
    map[match[v]] = next;
    ++next;
  }
  Level coarse;
  coarse.n = next;
  coarse.vw.assign(coarse.n * ncon, 0);
  for (std::size_t v = 0; v < fine.n; ++v) {
    for (int d = 0; d < ncon; ++d) coarse.vw[map[v] * ncon + d] += fine.vw[v * ncon + d];
  }

  // Group fine vertices by coarse id so each coarse row is assembled once.
  std::vector<std::uint32_t> members(fine.n);
  std::vector<std::size_t> start(coarse.n + 1, 0);
  for (std::size_t v = 0; v < fine.n; ++v) ++start[map[v] + 1];
  for (std::size_t c = 0; c < coarse.n; ++c) start[c + 1] += start[c];
  {
    auto cursor = start;
    for (std::size_t v = 0; v < fine.n; ++v) members[cursor[map[v]]++] = static_cast<std::uint32_t>(v);
  }

  std::vector<std::size_t> slot(coarse.n, std::numeric_limits<std::size_t>::max());
  coarse.xadj.assign(1, 0);
  for (std::size_t c = 0; c < coarse.n; ++c) {
    const std::size_t row_begin = coarse.adj.size();
    for (std::size_t i = start[c]; i < start[c + 1]; ++i) {
      const std::uint32_t v = members[i];
      for (std::size_t e = fine.xadj[v]; e < fine.xadj[v + 1]; ++e) {
        const std::uint32_t cu = map[fine.adj[e]];
        if (cu == c) continue;
        if (slot[cu] == std::numeric_limits<std::size_t>::max() || slot[cu] < row_begin) {
          slot[cu] = coarse.adj.size();
          coarse.adj.push_back(cu);
          coarse.ew.push_back(fine.ew[e]);
        } else {
          coarse.ew[slot[cu]] += fine.ew[e];
        }
      }
    }
    coarse.xadj.push_back(coarse.adj.size());
  }
  return coarse;
}

std::vector<std::uint32_t> heavy_edge_matching(const Level& g, int ncon, std::span<const double> limit, Rng& gen) {
  std::vector<std::uint32_t> order(g.n);
  std::iota(order.begin(), order.end(), 0u);
  seeded_shuffle(std::span<std::uint32_t>(order), gen);
  constexpr auto kUnmatched = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> match(g.n, kUnmatched);
  for (std::uint32_t u : order) {
    if (match[u] != kUnmatched) continue;
    std::uint32_t best = u;
    Weight best_w = -1;
    for (std::size_t e = g.xadj[u]; e < g.xadj[u + 1]; ++e) {
      const std::uint32_t v = g.adj[e];
      if (match[v] != kUnmatched) continue;
      bool ok = true;
      for (int d = 0; d < ncon && ok; ++d) {
        ok = static_cast<double>(g.vw[u * ncon + d] + g.vw[v * ncon + d]) <= limit[d];
      }
      if (!ok) continue;
      if (g.ew[e] > best_w || (g.ew[e] == best_w && v < best)) {
        best_w = g.ew[e];
        best = v;
      }
    }
    match[u] = best;
    match[best] = u;
  }
  return match;
}

// ---------------------------------------------------------------------------
// Initial partitioning

std::vector<PartitionId> grow_regions(const Level& g, int ncon, const Balance& bal, Rng& gen) {
  const std::uint32_t k = bal.k;
  constexpr PartitionId kFree = std::numeric_limits<PartitionId>::max();
  std::vector<PartitionId> part(g.n, kFree);
  Weight total0 = 0;
  for (std::size_t v = 0; v < g.n; ++v) total0 += g.vw[v * ncon];
  std::vector<Weight> attach(g.n, 0);
  std::size_t assigned = 0;

  for (PartitionId p = 0; p + 1 < k; ++p) {
    const double target = static_cast<double>(total0) * (p + 1) / k;
    double filled = 0;
    for (std::size_t v = 0; v < g.n; ++v) {
      if (part[v] != kFree && part[v] < p) filled += static_cast<double>(g.vw[v * ncon]);
    }
    // Max-heap on attachment weight to the growing region; ties go to the lower id.
    using Entry = std::pair<Weight, std::int64_t>;
    std::priority_queue<Entry> frontier;
    std::fill(attach.begin(), attach.end(), 0);
    while (filled < target && assigned < g.n) {
      std::int64_t v = -1;
      while (!frontier.empty()) {
        auto [w, negv] = frontier.top();
        frontier.pop();
        if (part[-negv] == kFree && attach[-negv] == w) {
          v = -negv;
          break;
        }
      }
      if (v < 0) {
        // Region is closed off: reseed from a random free vertex.
        std::vector<std::uint32_t> free;
        for (std::size_t u = 0; u < g.n; ++u)
          if (part[u] == kFree) free.push_back(static_cast<std::uint32_t>(u));
        std::uniform_int_distribution<std::size_t> pick(0, free.size() - 1);
        v = free[pick(gen)];
      }
      const double w0 = static_cast<double>(g.vw[v * ncon]);
      if (filled > 0 && filled + w0 > bal.cap[0] * (p + 1)) break;
      part[v] = p;
      filled += w0;
      ++assigned;
      for (std::size_t e = g.xadj[v]; e < g.xadj[v + 1]; ++e) {
        const auto u = g.adj[e];
        if (part[u] != kFree) continue;
        attach[u] += g.ew[e];
        frontier.emplace(attach[u], -static_cast<std::int64_t>(u));
      }
    }
  }
  for (auto& p : part)
    if (p == kFree) p = k - 1;
  return part;
}

// ---------------------------------------------------------------------------
// Refinement

struct Move {
  std::uint32_t v;
  PartitionId from;
  PartitionId to;
};

// Best move of v to an adjacent partition within the FM slack; returns false when none fits.
bool best_move(const Level& g, int ncon, std::span<const PartitionId> part, const Balance& bal, std::size_t v,
               std::vector<Weight>& conn, PartitionId& to, Weight& gain) {
  connections(g, part, v, conn);
  const PartitionId own = part[v];
  bool found = false;
  for (PartitionId q = 0; q < bal.k; ++q) {
    if (q == own || conn[q] == 0) continue;
    if (!bal.fits(&g.vw[v * ncon], q, true)) continue;
    const Weight gq = conn[q] - conn[own];
    if (!found || gq > gain) {
      found = true;
      gain = gq;
      to = q;
    }
  }
  return found;
}

// Returns true when the pass kept a non-empty prefix of moves.
bool fm_pass(const Level& g, int ncon, std::vector<PartitionId>& part, Balance& bal) {
  std::vector<Weight> conn(bal.k);
  std::vector<std::uint32_t> stamp(g.n, 0);
  std::vector<char> locked(g.n, 0);
  using Entry = std::tuple<Weight, std::int64_t, std::uint32_t>;  // gain, -v, stamp
  std::priority_queue<Entry> heap;

  auto push = [&](std::size_t v) {
    PartitionId to;
    Weight gain;
    ++stamp[v];
    if (best_move(g, ncon, part, bal, v, conn, to, gain)) {
      heap.emplace(gain, -static_cast<std::int64_t>(v), stamp[v]);
    }
  };
  for (std::size_t v = 0; v < g.n; ++v) {
    for (std::size_t e = g.xadj[v]; e < g.xadj[v + 1]; ++e) {
      if (part[g.adj[e]] != part[v]) {
        push(v);
        break;
      }
    }
  }

  const std::size_t patience = std::max<std::size_t>(25, g.n / 100);
  std::vector<Move> log;
  Weight cumulative = 0, best = 0;
  double best_violation = bal.violation();
  std::size_t best_len = 0, since_best = 0;
  while (!heap.empty()) {
    auto [gain_hint, negv, st] = heap.top();
    heap.pop();
    const auto v = static_cast<std::size_t>(-negv);
    if (locked[v] || st != stamp[v]) continue;
    PartitionId to;
    Weight gain;
    if (!best_move(g, ncon, part, bal, v, conn, to, gain)) continue;
    if (gain != gain_hint) {
      heap.emplace(gain, negv, st);
      continue;
    }
    const PartitionId from = part[v];
    bal.move(&g.vw[v * ncon], from, to);
    part[v] = to;
    locked[v] = 1;
    log.push_back({static_cast<std::uint32_t>(v), from, to});
    cumulative += gain;
    const double viol = bal.violation();
    if (viol < best_violation - 1e-12 || (viol <= best_violation + 1e-12 && cumulative > best)) {
      best = cumulative;
      best_violation = viol;
      best_len = log.size();
      since_best = 0;
    } else if (++since_best > patience) {
      break;
    }
    for (std::size_t e = g.xadj[v]; e < g.xadj[v + 1]; ++e) {
      if (!locked[g.adj[e]]) push(g.adj[e]);
    }
  }
  while (log.size() > best_len) {
    const Move m = log.back();
    log.pop_back();
    bal.move(&g.vw[m.v * ncon], m.to, m.from);
    part[m.v] = m.from;
  }
  return best_len > 0;
}

// Moves vertices out of overloaded partitions until no cap is exceeded. Each
// move strictly lowers total overload, so the loop terminates.
void rebalance(const Level& g, int ncon, std::vector<PartitionId>& part, Balance& bal) {
  std::vector<Weight> conn(bal.k);
  for (int round = 0; round < 64 && bal.violation() > 0; ++round) {
    struct Candidate {
      double delta;
      Weight gain;
      std::uint32_t v;
      PartitionId to;
    };
    std::vector<Candidate> cands;
    for (std::size_t v = 0; v < g.n; ++v) {
      const PartitionId p = part[v];
      const Weight* w = &g.vw[v * ncon];
      bool relieves = false;
      for (int d = 0; d < ncon && !relieves; ++d) relieves = w[d] > 0 && bal.overload(p, d) > 0;
      if (!relieves) continue;
      connections(g, part, v, conn);
      for (PartitionId q = 0; q < bal.k; ++q) {
        if (q == p) continue;
        const double delta = bal.move_delta(w, p, q);
        if (delta < -1e-12) cands.push_back({delta, conn[q] - conn[p], static_cast<std::uint32_t>(v), q});
      }
    }
    if (cands.empty()) return;
    // Prefer moves that keep the target within caps, then cheapest cut, then largest relief.
    std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
      if (a.gain != b.gain) return a.gain > b.gain;
      if (a.delta != b.delta) return a.delta < b.delta;
      return std::tie(a.v, a.to) < std::tie(b.v, b.to);
    });
    bool moved = false;
    for (int pass = 0; pass < 2 && bal.violation() > 0; ++pass) {
      for (const auto& c : cands) {
        if (bal.violation() <= 0) break;
        const Weight* w = &g.vw[c.v * ncon];
        const PartitionId p = part[c.v];
        if (p == c.to) continue;
        if (pass == 0 && !bal.fits(w, c.to)) continue;
        if (bal.move_delta(w, p, c.to) >= -1e-12) continue;
        bal.move(w, p, c.to);
        part[c.v] = c.to;
        moved = true;
      }
    }
    if (!moved) return;
  }
}

void refine(const Level& g, int ncon, std::vector<PartitionId>& part, Balance& bal) {
  bal.reset(g, part);
  if (bal.violation() > 0) rebalance(g, ncon, part, bal);
  for (int pass = 0; pass < 10; ++pass) {
    if (!fm_pass(g, ncon, part, bal)) break;
  }
}

}  // namespace

PartitionPlan multilevel_partition(const Graph& graph, std::uint32_t k, const VertexMasks* masks,
                                   const BalanceConstraints& constraints, std::uint64_t seed) {
  const std::size_t n = graph.num_vertices();
  if (k < 2) throw InputError("multilevel partitioning needs k >= 2");
  if (k > n) throw InputError("k=" + std::to_string(k) + " exceeds vertex count " + std::to_string(n));
  if (!(constraints.tolerance > 0.0 && constraints.tolerance < 1.0)) {
    throw InputError("balance tolerance must lie in (0, 1)");
  }
  if ((constraints.balance_train || constraints.balance_val_test) && masks == nullptr) {
    throw InputError("train/val/test balance constraints need vertex masks");
  }
  if (masks && masks->size() != n) throw InputError("mask size does not match graph");

  // Balance dimensions: vertex count, then each enabled constraint.
  std::vector<std::string> dim_names{"vertices"};
  std::vector<std::function<Weight(std::size_t)>> dims;
  dims.push_back([](std::size_t) { return Weight{1}; });
  auto role_dim = [&](Role r, const char* name) {
    dim_names.push_back(name);
    dims.push_back([masks, r](std::size_t v) { return Weight{masks->roles[v] == r ? 1 : 0}; });
  };
  if (constraints.balance_train) role_dim(Role::Train, "train");
  if (constraints.balance_degree) {
    dim_names.push_back("degree");
    dims.push_back([&graph](std::size_t v) { return static_cast<Weight>(graph.degree(static_cast<VertexId>(v))); });
  }
  if (constraints.balance_val_test) {
    role_dim(Role::Val, "val");
    role_dim(Role::Test, "test");
  }
  const int ncon = static_cast<int>(dims.size());

  Level base;
  base.n = n;
  base.vw.resize(n * ncon);
  std::vector<Weight> total(ncon, 0), heaviest(ncon, 0);
  for (std::size_t v = 0; v < n; ++v) {
    for (int d = 0; d < ncon; ++d) {
      const Weight w = dims[d](v);
      base.vw[v * ncon + d] = w;
      total[d] += w;
      heaviest[d] = std::max(heaviest[d], w);
    }
  }

  Balance bal{k, ncon, std::vector<double>(ncon), {}, {}};
  for (int d = 0; d < ncon; ++d) {
    const bool role = dim_names[d] == "train" || dim_names[d] == "val" || dim_names[d] == "test";
    if (role && total[d] < static_cast<Weight>(k)) {
      throw InfeasibleError("infeasible constraints: " + std::to_string(total[d]) + " " + dim_names[d] +
                            " vertices cannot be balanced over k=" + std::to_string(k));
    }
    if (d == 0) {
      bal.cap[d] = balance_cap(static_cast<double>(total[d]), k, constraints.tolerance);
    } else {
      // Requested constraints get the exact (1 + tolerance) * ideal bound, with
      // no rounding up; when that bound cannot hold every unit, say so.
      bal.cap[d] = std::floor((1.0 + constraints.tolerance) * static_cast<double>(total[d]) / k + 1e-9);
      if (bal.cap[d] * k < static_cast<double>(total[d])) {
        throw InfeasibleError("infeasible constraints: " + std::to_string(total[d]) + " " + dim_names[d] +
                              " over k=" + std::to_string(k) + " exceed the (1+" +
                              std::to_string(constraints.tolerance) + ") * ideal cap");
      }
    }
    if (static_cast<double>(heaviest[d]) > bal.cap[d]) {
      throw InfeasibleError("infeasible constraints: a single vertex exceeds the per-partition " + dim_names[d] +
                            " cap");
    }
  }

  // Symmetric unit-weight adjacency; directed inputs are symmetrized.
  if (graph.metadata().undirected) {
    base.xadj.assign(graph.row_offsets().begin(), graph.row_offsets().end());
    base.adj.assign(graph.col_indices().begin(), graph.col_indices().end());
  } else {
    std::vector<std::vector<std::uint32_t>> rows(n);
    for (std::size_t v = 0; v < n; ++v) {
      for (auto u : graph.neighbors(static_cast<VertexId>(v))) {
        rows[v].push_back(u);
        rows[u].push_back(static_cast<std::uint32_t>(v));
      }
    }
    base.xadj.assign(1, 0);
    for (auto& r : rows) {
      std::sort(r.begin(), r.end());
      r.erase(std::unique(r.begin(), r.end()), r.end());
      base.adj.insert(base.adj.end(), r.begin(), r.end());
      base.xadj.push_back(base.adj.size());
    }
  }
  base.ew.assign(base.adj.size(), 1);

  Rng gen(derive_seed({seed, 0x6d6c}));
  const std::size_t coarsen_to = std::max<std::size_t>(4 * k, 64);
  std::vector<double> limit(ncon);
  for (int d = 0; d < ncon; ++d) {
    limit[d] = std::max(static_cast<double>(heaviest[d]),
                        std::min(bal.cap[d] / 4.0, 2.0 * static_cast<double>(total[d]) / coarsen_to));
  }

  std::vector<Level> levels;
  levels.push_back(std::move(base));
  while (levels.back().n > coarsen_to) {
    auto match = heavy_edge_matching(levels.back(), ncon, limit, gen);
    std::vector<std::uint32_t> map;
    Level coarse = contract(levels.back(), ncon, match, map);
    if (coarse.n > levels.back().n * 95 / 100) break;
    levels.back().to_coarse = std::move(map);
    levels.push_back(std::move(coarse));
  }

  // Several region-growing tries on the coarsest graph; keep the best refined one.
  const Level& coarsest = levels.back();
  const int tries = coarsest.n <= 64 ? 16 : 8;
  std::vector<PartitionId> part;
  double best_violation = std::numeric_limits<double>::infinity();
  Weight best_cut = std::numeric_limits<Weight>::max();
  for (int t = 0; t < tries; ++t) {
    auto cand = grow_regions(coarsest, ncon, bal, gen);
    refine(coarsest, ncon, cand, bal);
    const double viol = bal.violation();
    const Weight cut = cut_of(coarsest, cand);
    if (viol < best_violation - 1e-12 || (viol <= best_violation + 1e-12 && cut < best_cut)) {
      best_violation = viol;
      best_cut = cut;
      part = std::move(cand);
    }
  }

  for (std::size_t lvl = levels.size() - 1; lvl-- > 0;) {
    const Level& fine = levels[lvl];
    std::vector<PartitionId> projected(fine.n);
    for (std::size_t v = 0; v < fine.n; ++v) projected[v] = part[fine.to_coarse[v]];
    part = std::move(projected);
    refine(fine, ncon, part, bal);
  }

  bal.reset(levels.front(), part);
  if (bal.violation() > 0) {
    std::string detail;
    for (int d = 0; d < ncon; ++d) {
      for (PartitionId p = 0; p < k; ++p) {
        if (bal.overload(p, d) > 0) {
          detail += " " + dim_names[d] + "[P" + std::to_string(p) + "]=" + std::to_string(bal.at(p, d)) +
                    ">cap " + std::to_string(bal.cap[d]);
        }
      }
    }
    throw InfeasibleError("infeasible constraints: refinement could not meet balance caps:" + detail);
  }

  PartitionPlan plan;
  plan.method = PartitionMethod::Multilevel;
  plan.k = k;
  plan.seed = seed;
  plan.constraints = constraints;
  plan.assignment = std::move(part);
  plan.counts = compute_counts(graph, masks, plan.assignment, k);
  return plan;
}

}  // namespace gnnwb
