#pragma once

#include <string>

#include <json.hpp>

namespace freqbias::cli {

using json = nlohmann::ordered_json;

/// Hex-encoded SHA-256 of a byte string.
std::string sha256_hex(const std::string& bytes);

/// Current UTC time in ISO-8601 form at second resolution.
std::string iso_utc_now();

/// Collects one run's inputs and outputs and writes its manifest.
///
/// Every artifact goes through write_output so it lands under the
/// configured output directory and is digested exactly as written.  The
/// finished manifest carries the resolved configuration, master seed,
/// input and output digests and the start/end timestamps; feeding it back
/// through `--config` re-executes the run bit-identically (timestamps and
/// the worker count are records, not configuration).
class RunRecorder {
 public:
  /// `config` must contain "out_dir" and "seed"; the directory is created
  /// immediately.
  RunRecorder(std::string command, json config, int workers);

  /// Records an input file digest.  `path` should be absolute so the
  /// manifest replays independently of the working directory.
  void note_input(const std::string& path, const std::string& bytes);

  /// Writes `bytes` to `<out_dir>/<name>` and records the digest.
  void write_output(const std::string& name, const std::string& bytes);

  /// Writes `<out_dir>/manifest.json`.  Call once, after all outputs.
  void finish();

  const std::string& out_dir() const { return out_dir_; }

 private:
  std::string command_;
  json config_;
  int workers_ = 1;
  std::string out_dir_;
  std::string started_at_;
  json inputs_ = json::array();
  json outputs_ = json::array();
};

/// Reads a JSON configuration file.  A plain object is returned as-is; a
/// run manifest (an object whose "command" is a string and whose "config"
/// is an object) is checked against `command` and unwrapped, so
/// `--config <old-run>/manifest.json` replays that run's configuration.
json load_config_file(const std::string& path, const std::string& command);

}  // namespace freqbias::cli
