#pragma once

// The gap / depth / verify / sweep / frame commands of the CLI, as library
// functions returning reports.

#include <string>
#include <vector>

#include "designgap/config.hpp"
#include "designgap/report.hpp"

namespace designgap {

struct CommandResult {
  Report report;
  bool checks_failed = false;
  /// Some quantity was computed over a budget-truncated range.
  bool truncated = false;
};

/// Exit codes of the CLI.
enum ExitCode : int {
  kExitOk = 0,
  kExitCheckFailed = 1,
  kExitConfigError = 2,
  kExitTruncated = 3,
  kExitEngineError = 4,
};

/// Check names accepted by verify.
const std::vector<std::string>& verify_check_names();

CommandResult cmd_gap(const RunConfig& cfg);
CommandResult cmd_depth(const RunConfig& cfg);
CommandResult cmd_verify(const RunConfig& cfg);
CommandResult cmd_sweep(const RunConfig& cfg);
CommandResult cmd_frame(const RunConfig& cfg);

/// Dispatches by name; throws ConfigError for an unknown command. Applies the
/// config's dense-dimension budget for the duration of the run.
CommandResult run_command(const std::string& command, const RunConfig& cfg);

/// 0 iff every check passed and no truncation occurred (unless allowed).
int exit_status(const CommandResult& r, bool allow_truncation);

}  // namespace designgap
