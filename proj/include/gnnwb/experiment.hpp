#pragma once

#include <filesystem>
#include <string>

#include "gnnwb/config.hpp"
#include "gnnwb/graph.hpp"

namespace gnnwb {

/// Environment variable that replaces the output root (default: the current
/// directory). The config's [output] dir is resolved against it.
inline constexpr const char* kOutputRootEnv = "GNNWB_OUTPUT_ROOT";

std::filesystem::path resolve_output_dir(const ExperimentConfig& config);

Graph build_graph(const GraphSource& source);
VertexMasks build_masks(const Graph& g, const MaskSpec& spec);

struct RunSummary {
  std::filesystem::path dir;
  std::size_t points = 0;
  std::size_t failed = 0;
};

/// Runs every (partition, sampler) grid point and writes reports plus
/// manifest.json under `out_dir`. A failing grid point is recorded in the
/// manifest with its error and the run continues.
RunSummary run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir);

/// Rebuilds summary.csv and cache_summary.csv next to the manifest from the
/// manifest alone. Returns the text of summary.csv.
std::string report_manifest(const std::filesystem::path& manifest_path);

}  // namespace gnnwb
