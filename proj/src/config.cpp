#include "gnnwb/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "gnnwb/error.hpp"

namespace gnnwb {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  if (line == 0) throw ConfigError("config: " + what);
  throw ConfigError("config line " + std::to_string(line) + ": " + what);
}

std::string fmt(double x) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

std::string fmt(bool b) { return b ? "true" : "false"; }

template <typename T>
std::string fmt_list(const std::vector<T>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ',';
    if constexpr (std::is_floating_point_v<T>) out += fmt(xs[i]);
    else out += std::to_string(xs[i]);
  }
  return out;
}

struct Value {
  std::string text;
  std::size_t line;

  template <typename T>
  T number() const {
    T out{};
    const auto r = std::from_chars(text.data(), text.data() + text.size(), out);
    if (r.ec != std::errc{} || r.ptr != text.data() + text.size()) {
      fail(line, "expected a number, got '" + text + "'");
    }
    return out;
  }

  bool boolean() const {
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    fail(line, "expected true or false, got '" + text + "'");
  }

  template <typename T>
  std::vector<T> list() const {
    std::vector<T> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(Value{trim(item), line}.number<T>());
    if (out.empty()) fail(line, "expected a comma-separated list");
    return out;
  }

  template <typename E>
  E choice(const std::vector<std::pair<std::string, E>>& options) const {
    for (const auto& [name, e] : options)
      if (name == text) return e;
    std::string names;
    for (const auto& [name, e] : options) names += (names.empty() ? "" : ", ") + name;
    fail(line, "'" + text + "' is not one of: " + names);
  }
};

const std::vector<std::pair<std::string, PartitionMethod>> kMethods{{"hash", PartitionMethod::Hash},
                                                                    {"multilevel", PartitionMethod::Multilevel},
                                                                    {"stream-v", PartitionMethod::StreamVertex},
                                                                    {"stream-b", PartitionMethod::StreamBlock}};
const std::vector<std::pair<std::string, SampleMethod>> kSamplers{
    {"fanout", SampleMethod::Fanout}, {"rate", SampleMethod::Rate}, {"hybrid", SampleMethod::Hybrid}};
const std::vector<std::pair<std::string, CachePolicy>> kPolicies{{"degree", CachePolicy::DegreeBased},
                                                                 {"presample", CachePolicy::PreSampling}};

std::string constraint_name(const BalanceConstraints& c) {
  if (!c.balance_train && !c.balance_degree && !c.balance_val_test) return "none";
  if (c.balance_train && !c.balance_degree && !c.balance_val_test) return "v";
  if (c.balance_train && c.balance_degree && !c.balance_val_test) return "ve";
  if (c.balance_train && c.balance_degree && c.balance_val_test) return "vet";
  std::string s;
  if (c.balance_train) s += "train+";
  if (c.balance_degree) s += "degree+";
  if (c.balance_val_test) s += "valtest+";
  s.pop_back();
  return s;
}

BalanceConstraints parse_constraints(const Value& v, double tolerance) {
  BalanceConstraints c;
  if (v.text == "none") {
  } else if (v.text == "v") {
    c = BalanceConstraints::metis_v();
  } else if (v.text == "ve") {
    c = BalanceConstraints::metis_ve();
  } else if (v.text == "vet") {
    c = BalanceConstraints::metis_vet();
  } else {
    std::stringstream ss(v.text);
    std::string item;
    while (std::getline(ss, item, '+')) {
      if (item == "train") c.balance_train = true;
      else if (item == "degree") c.balance_degree = true;
      else if (item == "valtest") c.balance_val_test = true;
      else fail(v.line, "unknown constraint '" + item + "' (use none, v, ve, vet or train+degree+valtest)");
    }
  }
  c.tolerance = tolerance;
  return c;
}

bool valid_name(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char ch) {
    return std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '_' || ch == '.';
  });
}

using Setter = std::function<void(const Value&)>;
using Table = std::map<std::string, Setter>;

struct Parser {
  ExperimentConfig cfg;
  bool have_graph_kind = false;
  std::size_t ratio_line = 0;
  std::vector<std::size_t> partition_lines, sampler_lines;
  // Deferred so the key order inside a section does not matter.
  std::vector<std::string> partition_constraints;
  std::vector<std::size_t> partition_constraint_lines;
  std::optional<std::size_t> adaptive_start, adaptive_max, adaptive_patience;
  std::optional<double> adaptive_growth;
  std::map<std::string, std::size_t> section_line;

  std::size_t at(const std::string& section) const {
    auto it = section_line.find(section);
    return it == section_line.end() ? 0 : it->second;
  }

  Table graph_table() {
    auto& g = cfg.graph;
    return {
        {"kind",
         [&, &g = g](const Value& v) {
           have_graph_kind = true;
           if (v.text == "sbm") {
             g.kind = GraphSource::Kind::Generated;
             g.gen.kind = GeneratorKind::SBM;
           } else if (v.text == "powerlaw") {
             g.kind = GraphSource::Kind::Generated;
             g.gen.kind = GeneratorKind::PowerLaw;
           } else if (v.text == "file") {
             g.kind = GraphSource::Kind::File;
           } else {
             fail(v.line, "graph kind must be sbm, powerlaw or file");
           }
         }},
        {"num_vertices",
         [&, &g = g](const Value& v) {
           g.gen.num_vertices = v.number<std::size_t>();
           g.load.num_vertices = g.gen.num_vertices;
         }},
        {"blocks", [&, &g = g](const Value& v) { g.gen.block_count = v.number<std::size_t>(); }},
        {"intra_prob", [&, &g = g](const Value& v) { g.gen.intra_prob = v.number<double>(); }},
        {"intra_probs", [&, &g = g](const Value& v) { g.gen.block_intra_probs = v.list<double>(); }},
        {"inter_prob", [&, &g = g](const Value& v) { g.gen.inter_prob = v.number<double>(); }},
        {"attach_degree", [&, &g = g](const Value& v) { g.gen.attach_degree = v.number<std::size_t>(); }},
        {"feature_dim",
         [&, &g = g](const Value& v) {
           g.gen.feature_dim = v.number<std::size_t>();
           g.load.feature_dim = g.gen.feature_dim;
         }},
        {"num_classes",
         [&, &g = g](const Value& v) {
           g.gen.num_classes = v.number<int>();
           g.load.num_classes = g.gen.num_classes;
         }},
        {"labels",
         [&, &g = g](const Value& v) {
           g.gen.label_source = v.choice<LabelSource>({{"random", LabelSource::Random}, {"block", LabelSource::Block}});
         }},
        {"feature_signal", [&, &g = g](const Value& v) { g.gen.feature_signal = v.number<double>(); }},
        {"seed",
         [&, &g = g](const Value& v) {
           g.gen.seed = v.number<std::uint64_t>();
           g.load.seed = g.gen.seed;
         }},
        {"undirected", [&, &g = g](const Value& v) { g.load.undirected = v.boolean(); }},
        {"edges", [&, &g = g](const Value& v) { g.edges_path = v.text; }},
        {"features", [&, &g = g](const Value& v) { g.features_path = v.text; }},
        {"label_file", [&, &g = g](const Value& v) { g.labels_path = v.text; }},
    };
  }

  Table masks_table() {
    auto& m = cfg.masks;
    return {
        {"train", [&, &m = m](const Value& v) { m.ratios.train = v.number<double>(); ratio_line = v.line; }},
        {"val", [&, &m = m](const Value& v) { m.ratios.val = v.number<double>(); ratio_line = v.line; }},
        {"test", [&, &m = m](const Value& v) { m.ratios.test = v.number<double>(); ratio_line = v.line; }},
        {"seed", [&, &m = m](const Value& v) { m.seed = v.number<std::uint64_t>(); }},
        {"file", [&, &m = m](const Value& v) { m.path = v.text; }},
    };
  }

  Table partition_table() {
    auto& p = cfg.partitions.back();
    const std::size_t idx = cfg.partitions.size() - 1;
    return {
        {"name", [&, &p = p](const Value& v) { p.name = v.text; }},
        {"method", [&, &p = p](const Value& v) { p.method = v.choice(kMethods); }},
        {"k", [&, &p = p](const Value& v) { p.k = v.number<std::uint32_t>(); }},
        {"seed", [&, &p = p](const Value& v) { p.seed = v.number<std::uint64_t>(); }},
        {"constraints",
         [&, idx, &p = p](const Value& v) {
           partition_constraints[idx] = v.text;
           partition_constraint_lines[idx] = v.line;
         }},
        {"tolerance", [&, &p = p](const Value& v) { p.constraints.tolerance = v.number<double>(); }},
        {"block_size", [&, &p = p](const Value& v) { p.stream.block_size = v.number<std::size_t>(); }},
        {"hop_cache_depth", [&, &p = p](const Value& v) { p.stream.hop_cache_depth = v.number<std::size_t>(); }},
        {"balance_slack", [&, &p = p](const Value& v) { p.stream.balance_slack = v.number<double>(); }},
    };
  }

  Table sampler_table() {
    auto& s = cfg.samplers.back();
    return {
        {"name", [&, &s = s](const Value& v) { s.name = v.text; }},
        {"method", [&, &s = s](const Value& v) { s.config.method = v.choice(kSamplers); }},
        {"layers", [&, &s = s](const Value& v) { s.config.num_layers = v.number<std::size_t>(); }},
        {"fanouts", [&, &s = s](const Value& v) { s.config.fanouts = v.list<std::size_t>(); }},
        {"rates", [&, &s = s](const Value& v) { s.config.rates = v.list<double>(); }},
        {"tau", [&, &s = s](const Value& v) { s.config.degree_threshold = v.number<double>(); }},
        {"seed", [&, &s = s](const Value& v) { s.seed = v.number<std::uint64_t>(); }},
    };
  }

  Table batch_table() {
    auto& b = cfg.batch;
    return {
        {"policy",
         [&, &b = b](const Value& v) {
           b.policy = v.choice<BatchPolicy>({{"random", BatchPolicy::Random}, {"cluster", BatchPolicy::ClusterBased}});
         }},
        {"size", [&, &b = b](const Value& v) { b.size = v.number<std::size_t>(); }},
        {"seed", [&, &b = b](const Value& v) { b.seed = v.number<std::uint64_t>(); }},
    };
  }

  Table cache_table() {
    auto& c = cfg.cache;
    return {
        {"policies",
         [&, &c = c](const Value& v) {
           c.policies.clear();
           std::stringstream ss(v.text);
           std::string item;
           while (std::getline(ss, item, ',')) c.policies.push_back(Value{trim(item), v.line}.choice(kPolicies));
         }},
        {"ratios", [&, &c = c](const Value& v) { c.ratios = v.list<double>(); }},
        {"presample_epochs", [&, &c = c](const Value& v) { c.presample_epochs = v.number<std::size_t>(); }},
        {"seed", [&, &c = c](const Value& v) { c.seed = v.number<std::uint64_t>(); }},
        {"gather_ratio", [&, &c = c](const Value& v) { c.gather_ratio = v.number<double>(); }},
        {"block_bytes", [&, &c = c](const Value& v) { c.block_bytes = v.number<std::size_t>(); }},
        {"thresholds", [&, &c = c](const Value& v) { c.thresholds = v.list<double>(); }},
    };
  }

  Table pipeline_table() {
    auto& p = cfg.pipeline;
    return {
        {"bp_per_sampled_edge", [&, &p = p](const Value& v) { p.bp_per_sampled_edge = v.number<double>(); }},
        {"bp_per_sampled_vertex", [&, &p = p](const Value& v) { p.bp_per_sampled_vertex = v.number<double>(); }},
        {"dt_per_byte", [&, &p = p](const Value& v) { p.dt_per_byte = v.number<double>(); }},
        {"nn_per_aggregation", [&, &p = p](const Value& v) { p.nn_per_aggregation = v.number<double>(); }},
    };
  }

  Table train_table() {
    auto& t = cfg.train;
    return {
        {"enabled", [&, &t = t](const Value& v) { t.enabled = v.boolean(); }},
        {"epochs", [&, &t = t](const Value& v) { t.config.epochs = v.number<std::size_t>(); }},
        {"optimizer",
         [&, &t = t](const Value& v) {
           t.config.optimizer = v.choice<OptimizerKind>({{"sgd", OptimizerKind::SGD}, {"adam", OptimizerKind::Adam}});
         }},
        {"lr", [&, &t = t](const Value& v) { t.config.lr = v.number<double>(); }},
        {"hidden", [&, &t = t](const Value& v) { t.config.hidden = v.number<std::size_t>(); }},
        {"batch_size", [&, &t = t](const Value& v) { t.config.batch_size = v.number<std::size_t>(); }},
        {"seed", [&, &t = t](const Value& v) { t.config.seed = v.number<std::uint64_t>(); }},
        {"adaptive",
         [&, &t = t](const Value& v) {
           if (v.boolean()) t.config.adaptive = AdaptiveBatchState{};
           else t.config.adaptive.reset();
         }},
        {"adaptive_start", [&, &t = t](const Value& v) { adaptive_start = v.number<std::size_t>(); }},
        {"adaptive_max", [&, &t = t](const Value& v) { adaptive_max = v.number<std::size_t>(); }},
        {"adaptive_growth", [&, &t = t](const Value& v) { adaptive_growth = v.number<double>(); }},
        {"adaptive_patience", [&, &t = t](const Value& v) { adaptive_patience = v.number<std::size_t>(); }},
        {"target_val_acc", [&, &t = t](const Value& v) { t.config.target_val_acc = v.number<double>(); }},
    };
  }

  Table output_table() {
    auto& o = cfg.output;
    return {
        {"dir", [&, &o = o](const Value& v) { o.dir = v.text; }},
        {"record_timings", [&, &o = o](const Value& v) { o.record_timings = v.boolean(); }},
        {"dump_subgraphs", [&, &o = o](const Value& v) { o.dump_subgraphs = v.boolean(); }},
    };
  }

  void run(const std::string& text) {
    std::istringstream in(text);
    std::string raw;
    std::size_t line_no = 0;
    Table table;
    std::string section;
    std::map<std::string, std::size_t> seen_sections;
    std::map<std::string, std::size_t> seen_keys;
    while (std::getline(in, raw)) {
      ++line_no;
      std::string line = raw;
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']') fail(line_no, "unterminated section header");
        section = trim(line.substr(1, line.size() - 2));
        seen_keys.clear();
        const bool repeatable = section == "partition" || section == "sampler";
        if (!repeatable && seen_sections.count(section)) {
          fail(line_no, "section [" + section + "] repeated (first at line " +
                            std::to_string(seen_sections[section]) + ")");
        }
        seen_sections.emplace(section, line_no);
        section_line[section] = line_no;
        if (section == "graph") table = graph_table();
        else if (section == "masks") table = masks_table();
        else if (section == "partition") {
          cfg.partitions.emplace_back();
          partition_lines.push_back(line_no);
          partition_constraints.emplace_back();
          partition_constraint_lines.push_back(line_no);
          table = partition_table();
        } else if (section == "sampler") {
          cfg.samplers.emplace_back();
          sampler_lines.push_back(line_no);
          table = sampler_table();
        } else if (section == "batch") table = batch_table();
        else if (section == "cache") table = cache_table();
        else if (section == "pipeline") table = pipeline_table();
        else if (section == "train") table = train_table();
        else if (section == "output") table = output_table();
        else fail(line_no, "unknown section [" + section + "]");
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) fail(line_no, "expected 'key = value'");
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (section.empty()) fail(line_no, "key '" + key + "' appears before any section");
      auto it = table.find(key);
      if (it == table.end()) fail(line_no, "unknown key '" + key + "' in [" + section + "]");
      if (seen_keys.count(key)) fail(line_no, "key '" + key + "' repeated in this section");
      seen_keys.emplace(key, line_no);
      if (value.empty()) fail(line_no, "key '" + key + "' has no value");
      it->second(Value{value, line_no});
    }
    if (!have_graph_kind) fail(line_no, "missing required key 'kind' in [graph]");
    if (cfg.partitions.empty()) fail(line_no, "config needs at least one [partition] section");
    finish();
  }

  void finish() {
    auto& g = cfg.graph;
    if (g.kind == GraphSource::Kind::File && g.edges_path.empty()) fail(at("graph"), "[graph] kind = file needs 'edges'");
    const auto& r = cfg.masks.ratios;
    if (r.train < 0 || r.val < 0 || r.test < 0) fail(ratio_line, "mask ratios must be non-negative");
    if (r.train + r.val + r.test > 1.0 + 1e-9) fail(ratio_line, "ratios sum > 1");

    std::map<std::string, std::size_t> names;
    for (std::size_t i = 0; i < cfg.partitions.size(); ++i) {
      auto& p = cfg.partitions[i];
      const std::size_t line = partition_lines[i];
      const double tol = p.constraints.tolerance;
      if (!(tol > 0.0 && tol < 1.0)) fail(line, "tolerance must lie in (0, 1)");
      if (!partition_constraints[i].empty()) {
        if (p.method != PartitionMethod::Multilevel) {
          fail(partition_constraint_lines[i], "constraints apply to multilevel partitions only");
        }
        p.constraints = parse_constraints(Value{partition_constraints[i], partition_constraint_lines[i]}, tol);
      }
      p.stream.mode = p.method == PartitionMethod::StreamBlock ? StreamMode::Block : StreamMode::Vertex;
      if (p.k < 1) fail(line, "k must be >= 1");
      if (p.stream.block_size < 1) fail(line, "block_size must be >= 1");
      if (p.stream.hop_cache_depth < 1) fail(line, "hop_cache_depth must be >= 1");
      if (p.name.empty()) {
        p.name = to_string(p.method) + "-k" + std::to_string(p.k);
        if (p.method == PartitionMethod::Multilevel) p.name += "-" + constraint_name(p.constraints);
      }
      if (!valid_name(p.name)) fail(line, "partition name '" + p.name + "' may only use letters, digits, '-', '_', '.'");
      if (names.count(p.name)) fail(line, "duplicate partition name '" + p.name + "'");
      names.emplace(p.name, line);
    }

    if (cfg.samplers.empty()) {
      cfg.samplers.emplace_back();
      sampler_lines.push_back(0);
    }
    names.clear();
    for (std::size_t i = 0; i < cfg.samplers.size(); ++i) {
      auto& s = cfg.samplers[i];
      const std::size_t line = sampler_lines[i];
      try {
        s.config.validate();
      } catch (const InputError& e) {
        fail(line, e.what());
      }
      if (s.name.empty()) {
        switch (s.config.method) {
          case SampleMethod::Fanout: s.name = "fanout-" + fmt_list(s.config.fanouts); break;
          case SampleMethod::Rate: s.name = "rate-" + fmt_list(s.config.rates); break;
          case SampleMethod::Hybrid: s.name = "hybrid-" + fmt_list(s.config.fanouts) + "-" + fmt_list(s.config.rates); break;
        }
        std::replace(s.name.begin(), s.name.end(), ',', '_');
      }
      if (!valid_name(s.name)) fail(line, "sampler name '" + s.name + "' may only use letters, digits, '-', '_', '.'");
      if (names.count(s.name)) fail(line, "duplicate sampler name '" + s.name + "'");
      names.emplace(s.name, line);
    }

    if (cfg.batch.size < 1) fail(at("batch"), "[batch] size must be >= 1");
    for (double x : cfg.cache.ratios)
      if (!(x >= 0.0 && x <= 1.0)) fail(at("cache"), "[cache] ratios must lie in [0, 1]");
    for (double x : cfg.cache.thresholds)
      if (!(x > 0.0 && x <= 1.0)) fail(at("cache"), "[cache] thresholds must lie in (0, 1]");
    if (cfg.cache.policies.empty()) fail(at("cache"), "[cache] needs at least one policy");
    if (cfg.cache.presample_epochs < 1) fail(at("cache"), "[cache] presample_epochs must be >= 1");
    if (cfg.cache.gather_ratio < 0) fail(at("cache"), "[cache] gather_ratio must be >= 0");
    try {
      cfg.pipeline.validate();
    } catch (const InputError& e) {
      fail(at("pipeline"), e.what());
    }

    auto& t = cfg.train.config;
    if (adaptive_start || adaptive_max || adaptive_growth || adaptive_patience) {
      if (!t.adaptive) fail(at("train"), "adaptive_* keys need 'adaptive = true' in [train]");
    }
    if (t.adaptive) {
      if (adaptive_start) t.adaptive->current_batch_size = *adaptive_start;
      if (adaptive_max) t.adaptive->max_batch_size = *adaptive_max;
      if (adaptive_growth) t.adaptive->growth_factor = *adaptive_growth;
      if (adaptive_patience) t.adaptive->patience = *adaptive_patience;
      const auto& a = *t.adaptive;
      if (a.current_batch_size < 1 || a.current_batch_size > a.max_batch_size) {
        fail(at("train"), "[train] needs 1 <= adaptive_start <= adaptive_max");
      }
      if (!(a.growth_factor > 1.0)) fail(at("train"), "[train] adaptive_growth must be > 1");
    }
    if (!(t.lr >= 0.0)) fail(at("train"), "[train] lr must be >= 0");
    if (t.batch_size < 1) fail(at("train"), "[train] batch_size must be >= 1");
    if (t.hidden < 1) fail(at("train"), "[train] hidden must be >= 1");
    if (cfg.train.enabled) {
      for (std::size_t i = 0; i < cfg.samplers.size(); ++i) {
        if (cfg.samplers[i].config.num_layers != 2) fail(sampler_lines[i], "training needs 2-layer samplers");
      }
    }
  }
};

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  Parser p;
  p.run(text);
  return std::move(p.cfg);
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::vector<ConfigSection> config_sections(const ExperimentConfig& c) {
  std::vector<ConfigSection> out;
  {
    ConfigSection s{"graph", {}};
    const auto& g = c.graph;
    if (g.kind == GraphSource::Kind::File) {
      s.values = {{"kind", "file"}, {"edges", g.edges_path}};
      if (!g.features_path.empty()) s.values.emplace_back("features", g.features_path);
      if (!g.labels_path.empty()) s.values.emplace_back("label_file", g.labels_path);
      if (g.load.num_vertices) s.values.emplace_back("num_vertices", std::to_string(*g.load.num_vertices));
      s.values.emplace_back("undirected", fmt(g.load.undirected));
      s.values.emplace_back("feature_dim", std::to_string(g.load.feature_dim));
      s.values.emplace_back("num_classes", std::to_string(g.load.num_classes));
      s.values.emplace_back("seed", std::to_string(g.load.seed));
    } else {
      const auto& gen = g.gen;
      s.values = {{"kind", gen.kind == GeneratorKind::SBM ? "sbm" : "powerlaw"},
                  {"num_vertices", std::to_string(gen.num_vertices)}};
      if (gen.kind == GeneratorKind::SBM) {
        s.values.emplace_back("blocks", std::to_string(gen.block_count));
        s.values.emplace_back("intra_prob", fmt(gen.intra_prob));
        if (!gen.block_intra_probs.empty()) s.values.emplace_back("intra_probs", fmt_list(gen.block_intra_probs));
        s.values.emplace_back("inter_prob", fmt(gen.inter_prob));
      } else {
        s.values.emplace_back("attach_degree", std::to_string(gen.attach_degree));
      }
      s.values.emplace_back("feature_dim", std::to_string(gen.feature_dim));
      s.values.emplace_back("num_classes", std::to_string(gen.num_classes));
      s.values.emplace_back("labels", gen.label_source == LabelSource::Block ? "block" : "random");
      s.values.emplace_back("feature_signal", fmt(gen.feature_signal));
      s.values.emplace_back("seed", std::to_string(gen.seed));
    }
    out.push_back(std::move(s));
  }
  {
    ConfigSection s{"masks",
                    {{"train", fmt(c.masks.ratios.train)},
                     {"val", fmt(c.masks.ratios.val)},
                     {"test", fmt(c.masks.ratios.test)},
                     {"seed", std::to_string(c.masks.seed)}}};
    if (!c.masks.path.empty()) s.values.emplace_back("file", c.masks.path);
    out.push_back(std::move(s));
  }
  for (const auto& p : c.partitions) {
    ConfigSection s{"partition",
                    {{"name", p.name},
                     {"method", to_string(p.method)},
                     {"k", std::to_string(p.k)},
                     {"seed", std::to_string(p.seed)}}};
    if (p.method == PartitionMethod::Multilevel) s.values.emplace_back("constraints", constraint_name(p.constraints));
    s.values.emplace_back("tolerance", fmt(p.constraints.tolerance));
    if (p.method == PartitionMethod::StreamBlock) s.values.emplace_back("block_size", std::to_string(p.stream.block_size));
    if (p.method == PartitionMethod::StreamVertex) {
      s.values.emplace_back("hop_cache_depth", std::to_string(p.stream.hop_cache_depth));
    }
    if (p.method == PartitionMethod::StreamVertex || p.method == PartitionMethod::StreamBlock) {
      s.values.emplace_back("balance_slack", fmt(p.stream.balance_slack));
    }
    out.push_back(std::move(s));
  }
  for (const auto& sp : c.samplers) {
    const auto& sc = sp.config;
    ConfigSection s{"sampler",
                    {{"name", sp.name},
                     {"method", sc.method == SampleMethod::Fanout ? "fanout"
                                : sc.method == SampleMethod::Rate ? "rate"
                                                                  : "hybrid"},
                     {"layers", std::to_string(sc.num_layers)}}};
    if (sc.method != SampleMethod::Rate) s.values.emplace_back("fanouts", fmt_list(sc.fanouts));
    if (sc.method != SampleMethod::Fanout) s.values.emplace_back("rates", fmt_list(sc.rates));
    if (sc.method == SampleMethod::Hybrid) {
      s.values.emplace_back("tau", sc.degree_threshold ? fmt(*sc.degree_threshold) : "mean_degree");
    }
    s.values.emplace_back("seed", std::to_string(sp.seed));
    out.push_back(std::move(s));
  }
  out.push_back({"batch",
                 {{"policy", c.batch.policy == BatchPolicy::Random ? "random" : "cluster"},
                  {"size", std::to_string(c.batch.size)},
                  {"seed", std::to_string(c.batch.seed)}}});
  {
    std::string policies;
    for (auto p : c.cache.policies) policies += (policies.empty() ? "" : ",") + to_string(p);
    out.push_back({"cache",
                   {{"policies", policies},
                    {"ratios", fmt_list(c.cache.ratios)},
                    {"presample_epochs", std::to_string(c.cache.presample_epochs)},
                    {"seed", std::to_string(c.cache.seed)},
                    {"gather_ratio", fmt(c.cache.gather_ratio)},
                    {"block_bytes", std::to_string(c.cache.block_bytes)},
                    {"thresholds", fmt_list(c.cache.thresholds)}}});
  }
  out.push_back({"pipeline",
                 {{"bp_per_sampled_edge", fmt(c.pipeline.bp_per_sampled_edge)},
                  {"bp_per_sampled_vertex", fmt(c.pipeline.bp_per_sampled_vertex)},
                  {"dt_per_byte", fmt(c.pipeline.dt_per_byte)},
                  {"nn_per_aggregation", fmt(c.pipeline.nn_per_aggregation)}}});
  {
    const auto& t = c.train.config;
    ConfigSection s{"train",
                    {{"enabled", fmt(c.train.enabled)},
                     {"epochs", std::to_string(t.epochs)},
                     {"optimizer", t.optimizer == OptimizerKind::SGD ? "sgd" : "adam"},
                     {"lr", fmt(t.lr)},
                     {"hidden", std::to_string(t.hidden)},
                     {"batch_size", std::to_string(t.batch_size)},
                     {"seed", std::to_string(t.seed)},
                     {"adaptive", fmt(t.adaptive.has_value())}}};
    if (t.adaptive) {
      s.values.emplace_back("adaptive_start", std::to_string(t.adaptive->current_batch_size));
      s.values.emplace_back("adaptive_max", std::to_string(t.adaptive->max_batch_size));
      s.values.emplace_back("adaptive_growth", fmt(t.adaptive->growth_factor));
      s.values.emplace_back("adaptive_patience", std::to_string(t.adaptive->patience));
    }
    if (t.target_val_acc) s.values.emplace_back("target_val_acc", fmt(*t.target_val_acc));
    out.push_back(std::move(s));
  }
  out.push_back({"output",
                 {{"dir", c.output.dir},
                  {"record_timings", fmt(c.output.record_timings)},
                  {"dump_subgraphs", fmt(c.output.dump_subgraphs)}}});
  return out;
}

std::string format_config(const ExperimentConfig& config) {
  std::string out;
  for (const auto& s : config_sections(config)) {
    if (!out.empty()) out += '\n';
    out += "[" + s.name + "]\n";
    for (const auto& [k, v] : s.values) {
      // An unset hybrid threshold is reported but must not round-trip as a key.
      if (s.name == "sampler" && k == "tau" && v == "mean_degree") continue;
      out += k + " = " + v + "\n";
    }
  }
  return out;
}

}  // namespace gnnwb
