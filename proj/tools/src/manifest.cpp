#include "gridcast/cli/manifest.hpp"

#include <array>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <memory>
#include <sstream>

#include <openssl/evp.h>

#include <json.hpp>

#include "gridcast/csv.hpp"
#include "gridcast/error.hpp"

namespace gridcast::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::string sha256_hex(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open '" + file.string() + "' for hashing");
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    fail(ErrorCode::IoError, "sha256 initialisation failed");
  }
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), std::streamsize(buf.size()));
    const auto got = in.gcount();
    if (got > 0) EVP_DigestUpdate(ctx.get(), buf.data(), std::size_t(got));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md.data(), &len);
  std::string hex;
  hex.reserve(2 * len);
  static constexpr char digits[] = "0123456789abcdef";
  for (unsigned i = 0; i < len; ++i) {
    hex.push_back(digits[md[i] >> 4]);
    hex.push_back(digits[md[i] & 0xF]);
  }
  return hex;
}

std::vector<FileDigest> digest_files(const std::vector<fs::path>& files) {
  std::vector<FileDigest> out;
  out.reserve(files.size());
  for (const auto& f : files) out.push_back({f.generic_string(), sha256_hex(f)});
  return out;
}

namespace {

std::tm utc_tm() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  return tm;
}

}  // namespace

std::string utc_now_iso() {
  const std::tm tm = utc_tm();
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string utc_now_compact() {
  const std::tm tm = utc_tm();
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
  return buf;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

void write_manifest(const fs::path& dir, const RunManifest& m) {
  ordered_json j;
  j["tool"] = "gridcast";
  j["tool_version"] = m.tool_version;
  j["command"] = m.command;
  j["arguments"] = m.arguments;
  j["config_hash"] = m.config_hash;
  j["seeds"] = ordered_json::object();
  for (const auto& [name, seed] : m.seeds) j["seeds"][name] = seed;
  auto digests = [](const std::vector<FileDigest>& files) {
    ordered_json arr = ordered_json::array();
    for (const auto& f : files) arr.push_back({{"path", f.path}, {"sha256", f.sha256}});
    return arr;
  };
  j["inputs"] = digests(m.inputs);
  j["outputs"] = digests(m.outputs);
  j["started"] = m.started;
  j["finished"] = m.finished;
  if (!m.notes.empty()) j["notes"] = m.notes;
  fs::create_directories(dir);
  csv::write_file_atomic(dir / "manifest.json", j.dump(2) + "\n");
}

RunManifest read_manifest(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open '" + file.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  RunManifest m;
  try {
    const auto j = ordered_json::parse(buf.str());
    m.tool_version = j.at("tool_version").get<std::string>();
    m.command = j.at("command").get<std::string>();
    m.arguments = j.at("arguments").get<std::vector<std::string>>();
    m.config_hash = j.at("config_hash").get<std::string>();
    for (const auto& [name, seed] : j.at("seeds").items()) m.seeds[name] = seed.get<std::uint64_t>();
    for (const auto& f : j.at("inputs")) m.inputs.push_back({f.at("path"), f.at("sha256")});
    for (const auto& f : j.at("outputs")) m.outputs.push_back({f.at("path"), f.at("sha256")});
    m.started = j.at("started").get<std::string>();
    m.finished = j.at("finished").get<std::string>();
    if (j.contains("notes")) m.notes = j["notes"].get<std::vector<std::string>>();
  } catch (const ordered_json::exception& e) {
    fail(ErrorCode::ParseError, file.string() + ": " + e.what());
  }
  return m;
}

}  // namespace gridcast::cli
