#include "app_config.hpp"

#include <cstdint>
#include <set>
#include <stdexcept>

#include "freqbias/errors.hpp"

namespace freqbias::cli {
namespace {

void add_sim_params(json& cfg) {
  cfg["population_size"] = 729;
  cfg["innovation_rate"] = 0.037;
  cfg["warmup_steps"] = 200;
}

void add_table_input(json& cfg) {
  cfg["table"] = "";
  cfg["y_max"] = 142;
}

/// Keys that are valid somewhere in the pipeline; merge_config skips these
/// when the current command has no use for them instead of erroring.
const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = [] {
    // The non-configuration fields our own outputs carry, so a params.json
    // or manifest payload merges without complaint.
    std::set<std::string> all{"schema_version", "tool",         "tool_version",
                              "timepoint_range", "n_timepoints", "n_variants"};
    for (const char* command : {"ingest", "simulate", "turnover", "warmup", "infer", "choose"}) {
      const json defaults = default_config(command);  // named: items() must not outlive it
      for (const auto& item : defaults.items()) all.insert(item.key());
    }
    return all;
  }();
  return keys;
}

}  // namespace

json default_config(const std::string& command) {
  json cfg;
  cfg["seed"] = std::uint64_t{42};
  cfg["out_dir"] = ".";
  if (command == "ingest") {
    cfg["events"] = "";
    cfg["from"] = nullptr;
    cfg["to"] = nullptr;
  } else if (command == "simulate") {
    add_sim_params(cfg);
    cfg["bias"] = 0.0;
    cfg["record_steps"] = 32;
  } else if (command == "turnover") {
    add_table_input(cfg);
    add_sim_params(cfg);
    cfg["neutral_reps"] = 0;
  } else if (command == "warmup") {
    cfg["population_size"] = 729;
    cfg["innovation_rate"] = 0.037;
    cfg["horizon"] = 400;
    cfg["reps"] = 100;
  } else if (command == "infer") {
    add_table_input(cfg);
    add_sim_params(cfg);
    cfg["iterations"] = 100000;
    cfg["tolerance"] = 0.01;
    cfg["prior_low"] = -0.2;
    cfg["prior_high"] = 0.2;
    cfg["gof_pseudo"] = 0;
    cfg["cv_folds"] = 0;
    cfg["cv_tolerances"] = json::array({0.005, 0.01, 0.05});
    cfg["save_reference"] = true;
  } else if (command == "choose") {
    add_table_input(cfg);
    add_sim_params(cfg);
    cfg["per_model"] = 50000;
    cfg["trees"] = 1000;
    cfg["bootstrap_rows"] = 0;
    cfg["mtry"] = 0;
    cfg["min_node_size"] = 1;
    cfg["bias_bound"] = 0.2;
    cfg["save_forest"] = false;
    cfg["save_reference"] = false;
  } else {
    throw std::logic_error("default_config: unknown command '" + command + "'");
  }
  return cfg;
}

void merge_config(json& dst, const json& src, const std::string& origin) {
  if (!src.is_object()) {
    throw InputError("config '" + origin + "' must hold a JSON object");
  }
  for (const auto& item : src.items()) {
    if (dst.contains(item.key())) {
      dst[item.key()] = item.value();
    } else if (known_keys().count(item.key()) == 0) {
      throw InputError("unknown configuration key '" + item.key() + "' in '" + origin + "'");
    }
  }
}

}  // namespace freqbias::cli
