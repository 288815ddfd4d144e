#pragma once

// Subcommands shared by the command-line tool and the acceptance suite. Each
// turns a scenario into a CSV table plus a JSON summary of its scalar results.

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ionmcmr/scenario.hpp"

namespace ionmcmr {

struct CommandResult {
  std::string file_name;  // from the scenario "output" field
  std::string csv;
  nlohmann::json summary;
};

const std::vector<std::string>& command_names();

/// Throws ConfigError when the scenario was written for another command.
CommandResult run_command(const std::string& name, const Scenario& scenario);

}  // namespace ionmcmr
