#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "coldcc/config.hpp"

// The front-end commands: each runs one kind of calculation from a RunConfig
// and writes its CSV/JSON files.

namespace coldcc::commands {

/// Any S-matrix unitarity defect above this makes a command fail.
inline constexpr double kUnitarityLimit = 1e-6;

enum ExitCode { kOk = 0, kUsage = 1, kConfigError = 2, kInvariantViolated = 3, kFailure = 4 };

struct CommandOptions {
  int threads = 1;
  /// Overrides the configured output directory.
  std::optional<std::filesystem::path> out_dir;
  std::ostream* log = nullptr;
};

struct CommandResult {
  int exit_code = kOk;
  std::vector<std::filesystem::path> files;
  double max_unitarity_defect = 0.0;
};

CommandResult cmd_levels(const config::RunConfig& config, const CommandOptions& options);
CommandResult cmd_rates(const config::RunConfig& config, const CommandOptions& options);
CommandResult cmd_adiabats(const config::RunConfig& config, const CommandOptions& options);
CommandResult cmd_scan(const config::RunConfig& config, const CommandOptions& options);
CommandResult cmd_compare(const config::RunConfig& config, const CommandOptions& options);

const std::vector<std::string>& command_names();

/// Dispatch by name; throws ConfigError for an unknown command.
CommandResult run_command(const std::string& name, const config::RunConfig& config, const CommandOptions& options);

}  // namespace coldcc::commands
