// Command-line front end: run, validate and report experiment configs.
//
// Exit codes: 0 success, 1 config error, 2 runtime error (including grid
// points that failed during an otherwise complete run).

#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "gnnwb/config.hpp"
#include "gnnwb/error.hpp"
#include "gnnwb/experiment.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;

int run(const std::string& path) {
  const auto config = gnnwb::load_config(path);
  const auto out = gnnwb::resolve_output_dir(config);
  const auto summary = gnnwb::run_experiment(config, out);
  std::cout << "wrote " << summary.points << " grid point(s) to " << summary.dir.string() << '\n';
  if (summary.failed > 0) {
    std::cerr << summary.failed << " grid point(s) or training run(s) failed; see "
              << (summary.dir / "manifest.json").string() << '\n';
    return kRuntimeError;
  }
  return kOk;
}

int validate(const std::string& path) {
  const auto config = gnnwb::load_config(path);
  std::cout << gnnwb::format_config(config);
  return kOk;
}

int report(const std::string& path) {
  std::cout << gnnwb::report_manifest(path);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GNN data-management workbench"};
  app.require_subcommand(1);
  std::string config_path, manifest_path;
  auto* run_cmd = app.add_subcommand("run", "Run every grid point of an experiment config");
  run_cmd->add_option("config", config_path, "Experiment config file")->required();
  auto* validate_cmd = app.add_subcommand("validate", "Parse a config and print it with defaults filled in");
  validate_cmd->add_option("config", config_path, "Experiment config file")->required();
  auto* report_cmd = app.add_subcommand("report", "Regenerate summary tables from a manifest");
  report_cmd->add_option("manifest", manifest_path, "manifest.json of a finished run")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*run_cmd) return run(config_path);
    if (*validate_cmd) return validate(config_path);
    return report(manifest_path);
  } catch (const gnnwb::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
}
