#include "core/checkpoint.hpp"

#include <cstring>

namespace bcn {

namespace {

constexpr char kMagic[4] = {'B', 'C', 'K', 'P'};
constexpr std::uint8_t kVersion = 1;

static_assert(sizeof(float) == 4, "32-bit IEEE floats required");

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
  out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xff));
  out.push_back(static_cast<std::uint8_t>((v >> 24) & 0xff));
}

void put_f32(std::vector<std::uint8_t>& out, float v) {
  std::uint32_t u;
  std::memcpy(&u, &v, 4);
  put_u32(out, u);
}

struct Cursor {
  const std::vector<std::uint8_t>& bytes;
  std::size_t pos = 0;

  std::uint8_t u8() {
    if (pos + 1 > bytes.size()) fail(ErrorKind::format, "checkpoint truncated");
    return bytes[pos++];
  }
  std::uint32_t u32() {
    if (pos + 4 > bytes.size()) fail(ErrorKind::format, "checkpoint truncated");
    std::uint32_t v = static_cast<std::uint32_t>(bytes[pos]) |
                      (static_cast<std::uint32_t>(bytes[pos + 1]) << 8) |
                      (static_cast<std::uint32_t>(bytes[pos + 2]) << 16) |
                      (static_cast<std::uint32_t>(bytes[pos + 3]) << 24);
    pos += 4;
    return v;
  }
  float f32() {
    std::uint32_t u = u32();
    float v;
    std::memcpy(&v, &u, 4);
    return v;
  }
  std::string str(std::size_t n) {
    if (pos + n > bytes.size()) fail(ErrorKind::format, "checkpoint truncated");
    std::string s(reinterpret_cast<const char*>(bytes.data() + pos), n);
    pos += n;
    return s;
  }
};

}  // namespace

std::vector<std::uint8_t> save_checkpoint(Network& net) {
  std::vector<std::uint8_t> out;
  out.insert(out.end(), kMagic, kMagic + 4);
  out.push_back(kVersion);
  out.push_back(static_cast<std::uint8_t>(net.config().variant));
  put_u32(out, static_cast<std::uint32_t>(net.config().channels));
  put_u32(out, static_cast<std::uint32_t>(net.config().n_res_blocks));

  std::vector<Network::TensorRef> refs = net.named_tensors();
  put_u32(out, static_cast<std::uint32_t>(refs.size()));
  for (const Network::TensorRef& r : refs) {
    put_u32(out, static_cast<std::uint32_t>(r.name.size()));
    out.insert(out.end(), r.name.begin(), r.name.end());
    out.push_back(static_cast<std::uint8_t>(r.tensor->rank));
    for (int d = 0; d < r.tensor->rank; ++d) {
      put_u32(out, static_cast<std::uint32_t>(r.tensor->dims[d]));
    }
    for (float v : r.tensor->data) put_f32(out, v);
  }
  return out;
}

Network load_checkpoint(const std::vector<std::uint8_t>& bytes) {
  Cursor c{bytes};
  if (bytes.size() < 5 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    fail(ErrorKind::format, "not a checkpoint: bad magic");
  }
  c.pos = 4;
  std::uint8_t version = c.u8();
  if (version != kVersion) {
    fail(ErrorKind::format, "unsupported checkpoint version " + std::to_string(version));
  }
  std::uint8_t variant = c.u8();
  if (variant > 1) fail(ErrorKind::format, "checkpoint has unknown variant byte");
  std::uint32_t channels = c.u32();
  std::uint32_t n_res = c.u32();
  if (channels < 8 || channels > 4096 || n_res < 1 || n_res > 1024) {
    fail(ErrorKind::format, "checkpoint architecture out of range");
  }

  ModelConfig cfg;
  cfg.variant = static_cast<Variant>(variant);
  cfg.channels = static_cast<int>(channels);
  cfg.n_res_blocks = static_cast<int>(n_res);
  cfg.seed = 0;
  Network net(cfg);

  std::vector<Network::TensorRef> refs = net.named_tensors();
  std::uint32_t count = c.u32();
  if (count != refs.size()) {
    fail(ErrorKind::format, "checkpoint tensor count does not match architecture");
  }
  for (const Network::TensorRef& r : refs) {
    std::string name = c.str(c.u32());
    if (name != r.name) {
      fail(ErrorKind::format, "checkpoint tensor '" + name + "' where '" + r.name + "' expected");
    }
    int rank = c.u8();
    if (rank != r.tensor->rank) {
      fail(ErrorKind::format, "checkpoint tensor '" + name + "' has wrong rank");
    }
    for (int d = 0; d < rank; ++d) {
      if (c.u32() != static_cast<std::uint32_t>(r.tensor->dims[d])) {
        fail(ErrorKind::format, "checkpoint tensor '" + name + "' has wrong shape");
      }
    }
    for (float& v : r.tensor->data) v = c.f32();
  }
  if (c.pos != bytes.size()) fail(ErrorKind::format, "checkpoint has trailing bytes");
  return net;
}

std::uint64_t checkpoint_id(const std::vector<std::uint8_t>& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace bcn
