#pragma once

#include <string>

#include <json.hpp>

namespace freqbias::cli {

using json = nlohmann::ordered_json;

/// One fully resolved invocation: the subcommand, its merged configuration
/// (defaults < config file < explicit flags), the requested worker count
/// (0 = all hardware threads) and the config file actually read — kept so
/// the manifest can list it among the inputs; empty when none was given.
struct RunRequest {
  std::string command;
  json cfg;
  int workers = 0;
  std::string config_path;
};

/// Executes the request, writing every artifact plus manifest.json under
/// cfg["out_dir"] and a one-line result summary to stdout.  Errors follow
/// the module contracts: InputError for unusable input or parameters,
/// DegenerateError when structurally valid data defeats the analysis.
void run_command(const RunRequest& request);

}  // namespace freqbias::cli
