// designgap <command> --config <path> [--out <path>] [--format csv|json] [--seed N] [--allow-truncation]

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "designgap/commands.hpp"

namespace {

bool write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return static_cast<bool>(std::cout);
  }
  std::ofstream out(path, std::ios::binary);
  out << text;
  return static_cast<bool>(out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral gaps, design-depth bounds and frame potentials of random circuits"};
  app.require_subcommand(1, 1);

  std::string config_path;
  std::string out_path;
  std::string format = "csv";
  std::optional<std::uint64_t> seed;
  bool allow_truncation = false;

  for (const char* name : {"gap", "depth", "verify", "sweep", "frame"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_path, "Report path (stdout when omitted)");
    sub->add_option("--format", format, "Report format")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--seed", seed, "Replace the configured seeds with this one");
    sub->add_flag("--allow-truncation", allow_truncation, "Exit 0 even when a budget truncated a computation");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : designgap::kExitConfigError;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  designgap::CommandResult result;
  try {
    designgap::RunConfig cfg = designgap::load_config(config_path);
    if (seed) cfg.seeds = {*seed};
    result = designgap::run_command(command, cfg);
  } catch (const designgap::ConfigError& e) {
    std::cerr << "designgap: config error: " << e.what() << "\n";
    return designgap::kExitConfigError;
  } catch (const designgap::Error& e) {
    std::cerr << "designgap: " << e.what() << "\n";
    return designgap::kExitEngineError;
  } catch (const std::exception& e) {
    std::cerr << "designgap: unexpected error: " << e.what() << "\n";
    return designgap::kExitEngineError;
  }

  const std::string text = format == "json" ? designgap::to_json(result.report) : designgap::to_csv(result.report);
  if (!write_output(out_path, text)) {
    std::cerr << "designgap: cannot write " << out_path << "\n";
    return designgap::kExitEngineError;
  }
  const int rc = designgap::exit_status(result, allow_truncation);
  if (rc == designgap::kExitCheckFailed) std::cerr << "designgap: at least one check failed\n";
  if (rc == designgap::kExitTruncated) {
    std::cerr << "designgap: a budget truncated the computation; pass --allow-truncation to accept\n";
  }
  return rc;
}
