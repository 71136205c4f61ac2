#pragma once

#include <string>

#include <json.hpp>

namespace freqbias::cli {

using json = nlohmann::ordered_json;

/// Built-in defaults for `command`, keyed like the CLI flags.  Simulation
/// parameters default to the headline calibration: N = 729, mu = 0.037,
/// 200 warm-up generations, 32 recorded steps, y_max = 142 and a bias
/// prior of +/-0.2.  Throws std::logic_error for an unknown command.
json default_config(const std::string& command);

/// Overlays `src` (a config file or an unwrapped manifest payload) onto
/// the full default key set in `dst`.  Keys the command does not use are
/// silently skipped when another command uses them — one config file can
/// serve the whole pipeline — as is descriptive metadata (schema_version
/// and friends, so `ingest` params.json feeds straight into `infer`).
/// Anything else raises InputError naming `origin`.
void merge_config(json& dst, const json& src, const std::string& origin);

}  // namespace freqbias::cli
