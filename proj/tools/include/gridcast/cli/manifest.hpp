#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace gridcast::cli {

struct FileDigest {
  std::string path;
  std::string sha256;
};

// Record of one command invocation. Wall-clock times live only here, so data
// outputs stay byte-identical across reruns.
struct RunManifest {
  std::string command;
  std::vector<std::string> arguments;
  std::string config_hash;  // hex FNV-1a of the canonical config JSON, empty if none
  std::map<std::string, std::uint64_t> seeds;
  std::vector<FileDigest> inputs;
  std::vector<FileDigest> outputs;
  std::string started;   // ISO-8601 UTC
  std::string finished;  // ISO-8601 UTC
  std::string tool_version;
  std::vector<std::string> notes;
};

std::string sha256_hex(const std::filesystem::path& file);
std::vector<FileDigest> digest_files(const std::vector<std::filesystem::path>& files);
std::string utc_now_iso();
// "YYYYMMDDTHHMMSSZ", usable in directory names.
std::string utc_now_compact();
std::string hex64(std::uint64_t value);

// Written atomically to <dir>/manifest.json.
void write_manifest(const std::filesystem::path& dir, const RunManifest& manifest);
RunManifest read_manifest(const std::filesystem::path& file);

}  // namespace gridcast::cli
