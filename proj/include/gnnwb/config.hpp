#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gnnwb/batch.hpp"
#include "gnnwb/graph.hpp"
#include "gnnwb/partition.hpp"
#include "gnnwb/sampler.hpp"
#include "gnnwb/trainer.hpp"
#include "gnnwb/transfer.hpp"

namespace gnnwb {

struct GraphSource {
  enum class Kind { Generated, File } kind = Kind::Generated;
  GraphGenSpec gen;
  std::string edges_path;
  std::string features_path;
  std::string labels_path;
  LoadOptions load;
};

struct MaskSpec {
  SplitRatios ratios;
  std::uint64_t seed = 0;
  std::string path;  // mask file; overrides the random split when set
};

struct PartitionSpec {
  std::string name;
  PartitionMethod method = PartitionMethod::Hash;
  std::uint32_t k = 2;
  std::uint64_t seed = 0;
  BalanceConstraints constraints;
  StreamConfig stream;
};

struct SamplerSpec {
  std::string name;
  SamplerConfig config;
  std::uint64_t seed = 0;
};

struct BatchSpec {
  BatchPolicy policy = BatchPolicy::Random;
  std::size_t size = 512;
  std::uint64_t seed = 0;
};

struct CacheSweep {
  std::vector<CachePolicy> policies{CachePolicy::DegreeBased, CachePolicy::PreSampling};
  std::vector<double> ratios{0.0, 0.1, 0.2, 0.3};
  std::size_t presample_epochs = 1;
  std::uint64_t seed = 0;
  double gather_ratio = 0.74;
  std::size_t block_bytes = 256 * 1024;
  std::vector<double> thresholds{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
};

struct TrainSpec {
  bool enabled = false;
  TrainConfig config;  // sampler is taken from each [sampler] section
};

struct OutputSpec {
  std::string dir = "results";
  bool record_timings = false;
  bool dump_subgraphs = false;
};

struct ExperimentConfig {
  GraphSource graph;
  MaskSpec masks;
  std::vector<PartitionSpec> partitions;
  std::vector<SamplerSpec> samplers;
  BatchSpec batch;
  CacheSweep cache;
  CostModel pipeline;
  TrainSpec train;
  OutputSpec output;
};

/// Parses the sectioned key = value format documented in the README. Every
/// missing value takes its documented default. Throws ConfigError naming the
/// line for unknown sections or keys, malformed values, and inconsistent
/// settings (e.g. split ratios summing past 1).
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// One section of a resolved config, keys in canonical order.
struct ConfigSection {
  std::string name;
  std::vector<std::pair<std::string, std::string>> values;
};

/// Every setting of the config, defaults included, as section/key/value text.
std::vector<ConfigSection> config_sections(const ExperimentConfig& config);

/// Canonical config text with every default filled in; parse_config of the
/// result reproduces the same config.
std::string format_config(const ExperimentConfig& config);

}  // namespace gnnwb
