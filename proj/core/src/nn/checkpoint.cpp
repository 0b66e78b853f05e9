#include "gridcast/nn/checkpoint.hpp"

#include <bit>
#include <fstream>
#include <sstream>

#include "gridcast/csv.hpp"
#include "gridcast/error.hpp"

namespace gridcast::nn {

namespace {

constexpr char kMagic[4] = {'G', 'C', 'K', 'P'};

template <class U>
void put(std::string& out, U v) {
  for (std::size_t i = 0; i < sizeof(U); ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

class Cursor {
 public:
  explicit Cursor(std::string_view bytes) : bytes_(bytes) {}

  template <class U>
  U get() {
    need(sizeof(U));
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) {
      v |= static_cast<U>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += sizeof(U);
    return v;
  }
  std::string_view take(std::size_t n) {
    need(n);
    auto s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const noexcept { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) fail(ErrorCode::ParseError, "checkpoint truncated at byte " + std::to_string(pos_));
  }
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 14695981039346656037ULL;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

std::string encode_checkpoint(const Checkpoint& ckpt) {
  std::string out(kMagic, 4);
  put<std::uint32_t>(out, kCheckpointVersion);
  put<std::uint64_t>(out, ckpt.seed);
  put<std::uint64_t>(out, ckpt.config_hash);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(ckpt.tensors.size()));
  for (const auto& [name, t] : ckpt.tensors) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
    out += name;
    put<std::uint32_t>(out, static_cast<std::uint32_t>(t.rank()));
    for (auto d : t.shape()) put<std::uint64_t>(out, d);
    for (double v : t.values()) put<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
  }
  return out;
}

Checkpoint decode_checkpoint(std::string_view bytes) {
  Cursor in(bytes);
  if (in.take(4) != std::string_view(kMagic, 4)) fail(ErrorCode::ParseError, "not a checkpoint (bad magic)");
  const auto version = in.get<std::uint32_t>();
  if (version != kCheckpointVersion) {
    fail(ErrorCode::ParseError, "unsupported checkpoint version " + std::to_string(version));
  }
  Checkpoint ckpt;
  ckpt.seed = in.get<std::uint64_t>();
  ckpt.config_hash = in.get<std::uint64_t>();
  const auto count = in.get<std::uint32_t>();
  for (std::uint32_t k = 0; k < count; ++k) {
    std::string name(in.take(in.get<std::uint32_t>()));
    const auto rank = in.get<std::uint32_t>();
    if (rank == 0 || rank > 8) fail(ErrorCode::ParseError, "tensor '" + name + "' has rank " + std::to_string(rank));
    std::vector<std::size_t> shape(rank);
    std::size_t n = 1;
    for (auto& d : shape) {
      d = static_cast<std::size_t>(in.get<std::uint64_t>());
      if (d != 0 && n > (std::size_t(1) << 40) / d) fail(ErrorCode::ParseError, "tensor '" + name + "' too large");
      n *= d;
    }
    std::vector<double> values(n);
    for (auto& v : values) v = std::bit_cast<double>(in.get<std::uint64_t>());
    if (!ckpt.tensors.emplace(name, Tensor(std::move(shape), std::move(values))).second) {
      fail(ErrorCode::ParseError, "duplicate tensor '" + name + "'");
    }
  }
  if (!in.done()) fail(ErrorCode::ParseError, "trailing bytes after checkpoint");
  return ckpt;
}

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  csv::write_file_atomic(path, encode_checkpoint(ckpt));
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return decode_checkpoint(buf.str());
}

Checkpoint snapshot(const ParameterStore& store, std::string_view prefix, std::uint64_t config_hash) {
  Checkpoint ckpt;
  ckpt.seed = store.seed();
  ckpt.config_hash = config_hash;
  for (const auto& [name, p] : store.all()) ckpt.tensors.emplace(std::string(prefix) + name, p.value);
  return ckpt;
}

ParameterStore restore(const Checkpoint& ckpt, std::string_view prefix) {
  ParameterStore store(ckpt.seed);
  for (const auto& [name, t] : ckpt.tensors) {
    if (name.starts_with(prefix)) store.assign(name.substr(prefix.size()), t);
  }
  return store;
}

}  // namespace gridcast::nn
