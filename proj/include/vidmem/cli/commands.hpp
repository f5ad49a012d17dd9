#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "vidmem/cli/run_config.hpp"

namespace vidmem::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntimeError = 1;
inline constexpr int kExitConfigError = 2;

// Report layout shared by all commands:
//   command, seed, config, metrics, fusion_weights, loss_traces, details,
//   wall_clock_seconds
// Only wall_clock_seconds varies between identical runs.
struct CommandResult {
  nlohmann::json report;
  int exit_code = kExitOk;
};

CommandResult run_command(const std::string& command, const RunConfig& cfg, const std::string& out_dir);

// Full command-line entry point: `vidmem <command> [--config PATH]
// [--seed N] [--out DIR] [--set key=value]...`. Writes the report to
// <out>/<command>.json and echoes it on `out`; diagnostics go to `err`.
int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace vidmem::cli
