#include "gnnwb/experiment.hpp"

#include <chrono>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "gnnwb/error.hpp"
#include "gnnwb/kernels.hpp"
#include "gnnwb/metrics.hpp"
#include "gnnwb/transfer.hpp"
#include "json.hpp"

namespace gnnwb {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

fs::path resolve_output_dir(const ExperimentConfig& config) {
  const char* root = std::getenv(kOutputRootEnv);
  fs::path base = root && *root ? fs::path(root) : fs::current_path();
  return base / config.output.dir;
}

Graph build_graph(const GraphSource& source) {
  if (source.kind == GraphSource::Kind::Generated) return generate_graph(source.gen);
  return load_graph_files(source.edges_path, source.load, source.features_path, source.labels_path);
}

VertexMasks build_masks(const Graph& g, const MaskSpec& spec) {
  if (spec.path.empty()) return split_masks(g.num_vertices(), spec.ratios, spec.seed);
  std::ifstream in(spec.path);
  if (!in) throw InputError("cannot open mask file '" + spec.path + "'");
  auto masks = read_masks(in);
  if (masks.size() != g.num_vertices()) throw InputError("mask file has the wrong number of vertices");
  return masks;
}

namespace {

std::string fmt(double x) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

template <typename F>
std::string to_text(F&& emit) {
  std::ostringstream out;
  emit(out);
  return out.str();
}

PartitionPlan make_plan(const Graph& g, const VertexMasks& masks, const PartitionSpec& spec) {
  PartitionPlan plan;
  switch (spec.method) {
    case PartitionMethod::Hash: plan = hash_partition(g, spec.k, spec.seed, &masks); break;
    case PartitionMethod::Multilevel:
      // k = 1 is a single part; the multilevel scheme itself needs k >= 2.
      plan = spec.k == 1 ? hash_partition(g, 1, spec.seed, &masks)
                         : multilevel_partition(g, spec.k, &masks, spec.constraints, spec.seed);
      plan.method = PartitionMethod::Multilevel;
      break;
    case PartitionMethod::StreamVertex: plan = stream_vertex_partition(g, masks, spec.k, spec.stream, spec.seed); break;
    case PartitionMethod::StreamBlock: plan = stream_block_partition(g, masks, spec.k, spec.stream, spec.seed); break;
  }
  plan.constraints = spec.constraints;
  return plan;
}

struct Outputs {
  fs::path root;
  ordered_json list = ordered_json::array();

  std::string add(const fs::path& rel, const std::string& text, ordered_json coords) {
    write_file(root / rel, text);
    coords["path"] = rel.generic_string();
    list.push_back(std::move(coords));
    return rel.generic_string();
  }
};

ordered_json run_point(const Graph& g, const VertexMasks& masks, const ExperimentConfig& cfg, const PartitionPlan& plan,
                       const PartitionPlan* clusters, const SamplerSpec& sampler, const fs::path& rel_dir,
                       Outputs& outputs) {
  const auto& cache_cfg = cfg.cache;
  ordered_json summary;
  const auto schedule =
      select_partitioned_batches(plan, masks, cfg.batch.size, cfg.batch.policy, clusters, cfg.batch.seed);
  const auto epoch = kernels::sample_epoch(g, schedule, sampler.config, sampler.seed, 0);
  const std::size_t d = g.feature_dim();

  if (cfg.output.dump_subgraphs) {
    outputs.add(rel_dir / "subgraphs.txt", to_text([&](std::ostream& o) { write_subgraph_dump(o, epoch); }),
                {{"kind", "subgraphs"}});
  }

  const auto load = comp_load(g, plan, epoch);
  const auto comm = comm_load(g, plan, epoch, d);
  outputs.add(rel_dir / "load.csv", to_text([&](std::ostream& o) { write_load_csv(o, load); }), {{"kind", "load"}});
  outputs.add(rel_dir / "comm.csv", to_text([&](std::ostream& o) { write_comm_csv(o, comm); }), {{"kind", "comm"}});

  std::uint64_t frontier_total = 0;
  for (const auto& sg : epoch) frontier_total += sg.sampled_vertices();
  const auto part_cc = clustering_stats(g, plan.members());
  const auto batch_cc = subgraph_clustering_stats(epoch);
  {
    std::ostringstream o;
    o << "set,kind,mean_clustering\n" << std::setprecision(10);
    for (std::size_t p = 0; p < part_cc.set_means.size(); ++p) o << p << ",partition," << part_cc.set_means[p] << '\n';
    for (std::size_t b = 0; b < batch_cc.set_means.size(); ++b) o << b << ",batch," << batch_cc.set_means[b] << '\n';
    outputs.add(rel_dir / "clustering.csv", o.str(), {{"kind", "clustering"}});
  }

  summary["batches"] = epoch.size();
  summary["edge_cut"] = edge_cut(g, plan);
  summary["frontier_vertices"] = frontier_total;
  summary["sampled_edges"] = load.total.sampled_edges;
  summary["local_requests"] = load.total.local_sample_requests;
  summary["remote_requests"] = load.total.remote_sample_requests;
  summary["load_imbalance"] = load.imbalance;
  summary["comm_bytes"] = comm.total.sent_feature_bytes;
  summary["comm_subgraph_edges"] = comm.total.sent_subgraph_edges;
  summary["comm_imbalance"] = comm.imbalance;
  summary["partition_cc_variance"] = part_cc.variance;
  summary["batch_cc_variance"] = batch_cc.variance;

  const TransferModel model{d, cache_cfg.gather_ratio};
  std::ostringstream blocks, pipeline;
  blocks << "policy,ratio,threshold,eligible_before,eligible_after,touched_blocks,vertices_per_block\n"
         << std::setprecision(10);
  pipeline << "policy,ratio,mode,makespan,bp_busy,dt_busy,nn_busy,dt_fraction\n" << std::setprecision(12);
  ordered_json transfers = ordered_json::array();
  std::optional<double> time_proxy;
  for (CachePolicy policy : cache_cfg.policies) {
    for (double ratio : cache_cfg.ratios) {
      CachePolicyConfig cc;
      cc.policy = policy;
      cc.capacity_ratio = ratio;
      cc.presample_epochs = cache_cfg.presample_epochs;
      cc.presample_batch_size = cfg.batch.size;
      cc.seed = cache_cfg.seed;
      const auto cache = build_cache(g, cc, &sampler.config, &masks);
      const auto report = simulate_transfer(epoch, cache, model);
      const std::string tag = to_string(policy) + "_" + fmt(ratio);
      const auto path =
          outputs.add(rel_dir / ("transfer_" + tag + ".csv"),
                      to_text([&](std::ostream& o) { write_transfer_csv(o, report); }),
                      {{"kind", "transfer"}, {"policy", to_string(policy)}, {"ratio", ratio}});

      const auto activity =
          block_activity(epoch, g.num_vertices(), cache, d, cache_cfg.block_bytes, cache_cfg.thresholds);
      for (std::size_t t = 0; t < activity.thresholds.size(); ++t) {
        blocks << to_string(policy) << ',' << fmt(ratio) << ',' << activity.thresholds[t] << ','
               << activity.eligible_before[t] << ',' << activity.eligible_after[t] << ',' << activity.touched_blocks
               << ',' << activity.vertices_per_block << '\n';
      }

      std::vector<StageCosts> costs;
      double dt = 0.0, total = 0.0;
      for (std::size_t b = 0; b < epoch.size(); ++b) {
        costs.push_back(estimate_stage_costs(epoch[b], report.batches[b].transferred_bytes_explicit, cfg.pipeline));
        dt += costs.back().dt;
        total += costs.back().total();
      }
      ordered_json entry{{"policy", to_string(policy)},
                         {"ratio", ratio},
                         {"hit_rate", report.hit_rate},
                         {"transferred_vertices", report.total.transferred_vertices},
                         {"bytes_zerocopy", report.total.transferred_bytes_zerocopy},
                         {"bytes_explicit", report.total.transferred_bytes_explicit},
                         {"path", path}};
      if (!costs.empty()) {
        const double dt_fraction = total > 0 ? dt / total : 0.0;
        for (auto mode : {PipelineMode::Sequential, PipelineMode::Pipelined}) {
          const auto t = simulate_pipeline(costs, mode);
          pipeline << to_string(policy) << ',' << fmt(ratio) << ',' << to_string(mode) << ',' << t.makespan << ','
                   << t.busy_fraction[0] << ',' << t.busy_fraction[1] << ',' << t.busy_fraction[2] << ','
                   << dt_fraction << '\n';
          entry[to_string(mode) + "_makespan"] = t.makespan;
          if (mode == PipelineMode::Sequential && !time_proxy) time_proxy = t.makespan;
        }
        entry["dt_fraction"] = dt_fraction;
      }
      transfers.push_back(std::move(entry));
    }
  }
  outputs.add(rel_dir / "block_activity.csv", blocks.str(), {{"kind", "block_activity"}});
  outputs.add(rel_dir / "pipeline.csv", pipeline.str(), {{"kind", "pipeline"}});
  // Simulated sequential epoch time under the first cache setting.
  summary["training_time_proxy"] = time_proxy.value_or(0.0);
  summary["transfer"] = std::move(transfers);
  return summary;
}

}  // namespace

RunSummary run_experiment(const ExperimentConfig& cfg, const fs::path& out_dir) {
  RunSummary result;
  result.dir = out_dir;
  fs::create_directories(out_dir);
  Outputs outputs{out_dir};

  ordered_json manifest;
  manifest["format"] = "gnnwb-manifest-1";
  ordered_json config_json = ordered_json::array();
  for (const auto& s : config_sections(cfg)) {
    ordered_json values = ordered_json::object();
    for (const auto& [k, v] : s.values) values[k] = v;
    config_json.push_back({{"section", s.name}, {"values", std::move(values)}});
  }
  manifest["config"] = std::move(config_json);
  outputs.add("config.ini", format_config(cfg), {{"kind", "config"}});

  const Graph g = build_graph(cfg.graph);
  const VertexMasks masks = build_masks(g, cfg.masks);
  manifest["graph"] = {{"num_vertices", g.num_vertices()},
                       {"num_edges", g.num_edges()},
                       {"feature_dim", g.feature_dim()},
                       {"num_classes", g.num_classes()},
                       {"train", masks.count(Role::Train)},
                       {"val", masks.count(Role::Val)},
                       {"test", masks.count(Role::Test)}};

  std::optional<PartitionPlan> clusters;
  std::string cluster_error;
  if (cfg.batch.policy == BatchPolicy::ClusterBased) {
    try {
      const std::size_t train = masks.count(Role::Train);
      const std::size_t needed = (train + cfg.batch.size - 1) / cfg.batch.size;
      const auto kc = static_cast<std::uint32_t>(std::min<std::size_t>(std::max<std::size_t>(needed, 2), g.num_vertices()));
      clusters = multilevel_partition(g, kc, nullptr, BalanceConstraints{}, cfg.batch.seed);
    } catch (const Error& e) {
      cluster_error = std::string("batch clustering: ") + e.what();
    }
  }

  std::ostringstream timings;
  timings << "partition,seconds\n" << std::setprecision(9);
  ordered_json points = ordered_json::array();
  for (const auto& pspec : cfg.partitions) {
    std::optional<PartitionPlan> plan;
    std::string plan_error = cluster_error;
    ordered_json plan_info;
    if (plan_error.empty()) {
      try {
        const auto t0 = std::chrono::steady_clock::now();
        plan = make_plan(g, masks, pspec);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        timings << pspec.name << ',' << secs << '\n';
        if (cfg.output.record_timings) plan_info["partition_seconds"] = secs;
        plan_info["plan"] = outputs.add(fs::path(pspec.name) / "plan.txt",
                                        to_text([&](std::ostream& o) { write_plan(o, *plan); }),
                                        {{"kind", "plan"}, {"partition", pspec.name}});
      } catch (const Error& e) {
        plan_error = std::string("partition ") + pspec.name + ": " + e.what();
      }
    }
    for (const auto& sspec : cfg.samplers) {
      ordered_json point{{"partition", pspec.name}, {"sampler", sspec.name}};
      ++result.points;
      if (!plan) {
        point["status"] = "failed";
        point["error"] = plan_error;
        ++result.failed;
        points.push_back(std::move(point));
        continue;
      }
      const fs::path rel = fs::path(pspec.name) / sspec.name;
      const std::size_t before = outputs.list.size();
      try {
        ordered_json summary = run_point(g, masks, cfg, *plan, clusters ? &*clusters : nullptr, sspec, rel, outputs);
        point["status"] = "ok";
        for (auto it = plan_info.begin(); it != plan_info.end(); ++it) summary[it.key()] = it.value();
        point["summary"] = std::move(summary);
      } catch (const std::exception& e) {
        point["status"] = "failed";
        point["error"] = std::string("grid point ") + pspec.name + "/" + sspec.name + ": " + e.what();
        ++result.failed;
      }
      // Tag this point's files with its grid coordinates.
      for (std::size_t i = before; i < outputs.list.size(); ++i) {
        outputs.list[i]["partition"] = pspec.name;
        outputs.list[i]["sampler"] = sspec.name;
      }
      points.push_back(std::move(point));
    }
  }

  if (cfg.train.enabled) {
    ordered_json runs = ordered_json::array();
    for (const auto& sspec : cfg.samplers) {
      ordered_json run{{"sampler", sspec.name}};
      try {
        TrainConfig tc = cfg.train.config;
        tc.sampler = sspec.config;
        const auto log = train(g, masks, tc);
        run["status"] = "ok";
        run["path"] = outputs.add(fs::path("train") / (sspec.name + ".csv"),
                                  to_text([&](std::ostream& o) { write_train_csv(o, log, cfg.output.record_timings); }),
                                  {{"kind", "train"}, {"sampler", sspec.name}});
        run["final_val_acc"] = log.final_val_acc();
        run["total_updates"] = log.total_updates;
        run["total_sampled_edges"] = log.total_sampled_edges();
        if (log.updates_to_target) run["updates_to_target"] = *log.updates_to_target;
      } catch (const std::exception& e) {
        run["status"] = "failed";
        run["error"] = std::string("training with ") + sspec.name + ": " + e.what();
        ++result.failed;
      }
      runs.push_back(std::move(run));
    }
    manifest["training"] = std::move(runs);
  }

  if (cfg.output.record_timings) outputs.add("timings.csv", timings.str(), {{"kind", "timings"}});
  manifest["points"] = std::move(points);
  manifest["outputs"] = outputs.list;
  manifest["failed"] = result.failed;
  write_file(out_dir / "manifest.json", manifest.dump(2) + "\n");
  report_manifest(out_dir / "manifest.json");
  return result;
}

std::string report_manifest(const fs::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw InputError("cannot open manifest '" + manifest_path.string() + "'");
  ordered_json manifest;
  try {
    manifest = ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InputError("manifest '" + manifest_path.string() + "' is not valid JSON: " + e.what());
  }
  if (manifest.value("format", "") != "gnnwb-manifest-1") throw InputError("not a gnnwb manifest");

  static const char* kColumns[] = {"edge_cut",          "comm_bytes",           "comm_imbalance",
                                   "load_imbalance",    "remote_requests",      "partition_cc_variance",
                                   "batch_cc_variance", "frontier_vertices",    "sampled_edges",
                                   "batches",           "training_time_proxy"};
  std::ostringstream summary, cache;
  summary << "partition,sampler,status";
  for (const char* c : kColumns) summary << ',' << c;
  summary << '\n';
  cache << "partition,sampler,policy,ratio,hit_rate,bytes_zerocopy,bytes_explicit,sequential_makespan,"
           "pipelined_makespan,dt_fraction\n";
  auto cell = [](const ordered_json& j, const char* key) {
    if (!j.contains(key)) return std::string();
    const auto& v = j[key];
    if (v.is_number_float()) return fmt(v.get<double>());
    return v.dump();
  };
  try {
    for (const auto& p : manifest.at("points")) {
      const std::string part = p.at("partition"), samp = p.at("sampler"), status = p.at("status");
      summary << part << ',' << samp << ',' << status;
      const auto s = p.contains("summary") ? p["summary"] : ordered_json::object();
      for (const char* c : kColumns) summary << ',' << cell(s, c);
      summary << '\n';
      if (!s.contains("transfer")) continue;
      for (const auto& t : s["transfer"]) {
        cache << part << ',' << samp << ',' << t.at("policy").get<std::string>() << ',' << cell(t, "ratio") << ','
              << cell(t, "hit_rate") << ',' << cell(t, "bytes_zerocopy") << ',' << cell(t, "bytes_explicit") << ','
              << cell(t, "sequential_makespan") << ',' << cell(t, "pipelined_makespan") << ','
              << cell(t, "dt_fraction") << '\n';
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError("manifest is missing fields: " + std::string(e.what()));
  }
  const fs::path dir = manifest_path.parent_path();
  write_file(dir / "summary.csv", summary.str());
  write_file(dir / "cache_summary.csv", cache.str());
  return summary.str();
}

}  // namespace gnnwb
