#pragma once

// Run manifests, content hashes, and the declarative run-config document.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>
#include <openssl/evp.h>
#include <toml.hpp>

#include "sabergen/errors.hpp"

namespace sabergen {

inline constexpr const char* kToolVersion = "0.1.0";

inline std::string sha256_hex(std::string_view bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256 failed");
  }
  std::string hex;
  hex.reserve(2 * len);
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", md[i]);
    hex += buf;
  }
  return hex;
}

inline std::string read_file_bytes(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  if (!is) throw ConfigError("cannot open " + p.string());
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

inline std::string sha256_file(const std::filesystem::path& p) { return sha256_hex(read_file_bytes(p)); }

// Hashes every regular file under `root` (or `root` itself if it is a file),
// keyed by path relative to `root`.
inline std::map<std::string, std::string> hash_tree(const std::filesystem::path& root) {
  namespace fs = std::filesystem;
  std::map<std::string, std::string> out;
  if (fs::is_regular_file(root)) {
    out[root.filename().string()] = sha256_file(root);
    return out;
  }
  if (!fs::is_directory(root)) return out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), root).generic_string()] = sha256_file(e.path());
  }
  return out;
}

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct RunManifest {
  std::string subcommand;
  nlohmann::json config;  // fully resolved
  std::map<std::string, std::uint64_t> seeds;
  std::map<std::string, std::string> inputs;   // path -> sha256
  std::map<std::string, std::string> outputs;  // relative path -> sha256
  nlohmann::json extra = nlohmann::json::object();
  std::string tool_version = kToolVersion;
  std::string started;
  std::string finished;
};

inline void to_json(nlohmann::json& j, const RunManifest& m) {
  j = {{"subcommand", m.subcommand}, {"config", m.config},     {"seeds", m.seeds},
       {"inputs", m.inputs},         {"outputs", m.outputs},   {"extra", m.extra},
       {"tool_version", m.tool_version}, {"started", m.started}, {"finished", m.finished}};
}

inline void from_json(const nlohmann::json& j, RunManifest& m) {
  j.at("subcommand").get_to(m.subcommand);
  m.config = j.at("config");
  m.seeds = j.value("seeds", decltype(m.seeds){});
  m.inputs = j.value("inputs", decltype(m.inputs){});
  m.outputs = j.value("outputs", decltype(m.outputs){});
  m.extra = j.value("extra", nlohmann::json::object());
  m.tool_version = j.value("tool_version", std::string{});
  m.started = j.value("started", std::string{});
  m.finished = j.value("finished", std::string{});
}

inline void write_manifest(const std::filesystem::path& path, const RunManifest& m) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write manifest " + path.string());
  os << nlohmann::json(m).dump(2) << '\n';
}

inline RunManifest read_manifest(const std::filesystem::path& path) {
  try {
    return nlohmann::json::parse(read_file_bytes(path)).get<RunManifest>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("manifest " + path.string() + ": " + e.what());
  }
}

// Loads a run-config document. TOML unless the extension is .json; TOML is
// converted through its JSON form so both share one representation.
inline nlohmann::json load_config_document(const std::filesystem::path& path) {
  const auto text = read_file_bytes(path);
  try {
    if (path.extension() == ".json") return nlohmann::json::parse(text);
    const auto table = toml::parse(text, path.string());
    std::ostringstream os;
    os << toml::json_formatter{table};
    return nlohmann::json::parse(os.str());
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << "config " << path.string() << ": " << e.description() << " at line " << e.source().begin.line;
    throw ConfigError(os.str());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
}

}  // namespace sabergen
