#include "manifest.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <stdexcept>
#include <utility>

#include "freqbias/errors.hpp"
#include "freqbias/frequency_table.hpp"
#include "freqbias/version.hpp"

namespace freqbias::cli {

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest computation failed");
  }
  static const char kHex[] = "0123456789abcdef";
  std::string out(2 * length, '0');
  for (unsigned int i = 0; i < length; ++i) {
    out[2 * i] = kHex[digest[i] >> 4];
    out[2 * i + 1] = kHex[digest[i] & 0xf];
  }
  return out;
}

std::string iso_utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buf;
}

RunRecorder::RunRecorder(std::string command, json config, int workers)
    : command_(std::move(command)),
      config_(std::move(config)),
      workers_(workers),
      started_at_(iso_utc_now()) {
  out_dir_ = config_.at("out_dir").get<std::string>();
  std::error_code ec;
  std::filesystem::create_directories(out_dir_, ec);
  if (ec) {
    throw InputError("cannot create output directory '" + out_dir_ + "': " + ec.message());
  }
}

void RunRecorder::note_input(const std::string& path, const std::string& bytes) {
  inputs_.push_back(json{{"path", path}, {"sha256", sha256_hex(bytes)}});
}

void RunRecorder::write_output(const std::string& name, const std::string& bytes) {
  write_text_file((std::filesystem::path(out_dir_) / name).string(), bytes);
  outputs_.push_back(json{{"path", name}, {"sha256", sha256_hex(bytes)}});
}

void RunRecorder::finish() {
  json manifest;
  manifest["schema_version"] = 1;
  manifest["tool"] = "freqbias";
  manifest["tool_version"] = version();
  manifest["command"] = command_;
  manifest["seed"] = config_.at("seed").get<std::uint64_t>();
  manifest["workers"] = workers_;
  manifest["started_at"] = started_at_;
  manifest["finished_at"] = iso_utc_now();
  manifest["config"] = config_;
  manifest["inputs"] = inputs_;
  manifest["outputs"] = outputs_;
  write_text_file((std::filesystem::path(out_dir_) / "manifest.json").string(),
                  manifest.dump(2) + "\n");
}

json load_config_file(const std::string& path, const std::string& command) {
  json parsed;
  try {
    parsed = json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw InputError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  if (!parsed.is_object()) {
    throw InputError("config file '" + path + "' must hold a JSON object");
  }
  if (parsed.contains("command") && parsed["command"].is_string() &&
      parsed.contains("config") && parsed["config"].is_object()) {
    const auto recorded = parsed["command"].get<std::string>();
    if (recorded != command) {
      throw InputError("manifest '" + path + "' records command '" + recorded + "', not '" +
                       command + "'");
    }
    return parsed["config"];
  }
  return parsed;
}

}  // namespace freqbias::cli
