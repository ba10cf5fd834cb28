#pragma once

#include <string>
#include <vector>

#include "cli_support.hpp"

namespace unilab::cli {

/// Result of a subcommand: the summary document (written as <command>.json)
/// and whether every internal check passed (bs-check only).
struct CommandResult {
  json summary;
  bool ok = true;
};

const std::vector<std::string>& command_names();

/// Runs `name` with the given reader; writes CSV artifacts through `out`.
CommandResult run_command(const std::string& name, ConfigReader& config, const Artifacts& out);

}  // namespace unilab::cli
