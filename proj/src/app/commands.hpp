#ifndef PADSIM_APP_COMMANDS_HPP
#define PADSIM_APP_COMMANDS_HPP

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "app/config.hpp"

namespace padsim::app {

enum ExitCode : int {
  kExitOk = 0,
  kExitAcceptanceFailed = 1,
  kExitValidation = 2,
  kExitRuntime = 3,
};

struct CommandOptions {
  std::filesystem::path out_dir;  ///< empty: use the config's output_dir
  unsigned threads = 1;
};

struct CommandResult {
  int exit_code = kExitOk;
  std::string text;  ///< human-readable summary or acceptance table
  std::vector<std::filesystem::path> files;
};

/// Runs items [0, count) on up to `threads` workers. The first exception
/// thrown by any item is rethrown after all workers finish.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn);

/// Six significant digits, as used in every CSV.
std::string fmt6(double v);

CommandResult cmd_bloch(const RunConfig& cfg, const CommandOptions& opt);
CommandResult cmd_fidelity(const RunConfig& cfg, const CommandOptions& opt);
CommandResult cmd_pad(const RunConfig& cfg, const CommandOptions& opt);
CommandResult cmd_speedup(const RunConfig& cfg, const CommandOptions& opt);
CommandResult cmd_accept(const RunConfig& cfg, const CommandOptions& opt);

/// Validates the config, dispatches by name and maps errors to exit codes.
/// Unknown command names are validation errors.
CommandResult run_command(const std::string& name, const RunConfig& cfg, const CommandOptions& opt);

}  // namespace padsim::app

#endif  // PADSIM_APP_COMMANDS_HPP
