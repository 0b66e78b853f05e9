#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "gridcast/nn/params.hpp"
#include "gridcast/nn/tensor.hpp"

namespace gridcast::nn {

// Self-describing named-tensor container. Layout (all integers and values
// little-endian): "GCKP", u32 version, u64 seed, u64 config hash, u32 count,
// then per tensor: u32 name length, name bytes, u32 rank, u64 dims, f64 values.
struct Checkpoint {
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
  std::map<std::string, Tensor> tensors;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

std::string encode_checkpoint(const Checkpoint& ckpt);
Checkpoint decode_checkpoint(std::string_view bytes);

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint read_checkpoint(const std::filesystem::path& path);

Checkpoint snapshot(const ParameterStore& store, std::string_view prefix, std::uint64_t config_hash);
// Loads every tensor whose name starts with prefix (prefix stripped).
ParameterStore restore(const Checkpoint& ckpt, std::string_view prefix);

// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

}  // namespace gridcast::nn
