#include "core/container.hpp"

#include <cstring>

namespace bcn {

namespace {

constexpr char kMagic[4] = {'B', 'C', 'N', '1'};
constexpr std::uint8_t kVersion = 1;

void check_header(const ContainerHeader& h, ErrorKind kind) {
  if (h.colorspace != Colorspace::ycbcr && h.colorspace != Colorspace::lab) {
    fail(kind, "container colorspace must be YCbCr or Lab");
  }
  if (h.width == 0 || h.height == 0) fail(kind, "container dims must be positive");
  if (h.quality < 1 || h.quality > 100) fail(kind, "container quality out of range 1..100");
  if (h.predictor_on != (h.model_id != 0)) {
    fail(kind, "container model id must be zero exactly when the predictor is off");
  }
}

}  // namespace

std::vector<std::uint8_t> serialize_header(const ContainerHeader& h) {
  check_header(h, ErrorKind::argument);
  std::vector<std::uint8_t> out;
  out.reserve(kContainerHeaderSize);
  out.insert(out.end(), kMagic, kMagic + 4);
  out.push_back(kVersion);
  std::uint8_t flags = h.predictor_on ? 1 : 0;
  flags |= static_cast<std::uint8_t>((h.colorspace == Colorspace::lab ? 1 : 0) << 1);
  out.push_back(flags);
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((h.width >> (8 * i)) & 0xff));
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((h.height >> (8 * i)) & 0xff));
  out.push_back(static_cast<std::uint8_t>(h.quality));
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>((h.model_id >> (8 * i)) & 0xff));
  return out;
}

ContainerHeader parse_header(const std::uint8_t* data, std::size_t size) {
  if (size < kContainerHeaderSize) fail(ErrorKind::format, "container truncated before header end");
  if (std::memcmp(data, kMagic, 4) != 0) fail(ErrorKind::format, "not a container: bad magic");
  if (data[4] != kVersion) {
    fail(ErrorKind::format, "unsupported container version " + std::to_string(data[4]));
  }
  std::uint8_t flags = data[5];
  if (flags & ~0x07u) fail(ErrorKind::format, "container has unknown flag bits");
  int cs_code = (flags >> 1) & 0x03;
  if (cs_code > 1) fail(ErrorKind::format, "container has unknown colorspace code");

  ContainerHeader h;
  h.predictor_on = (flags & 1) != 0;
  h.colorspace = cs_code == 1 ? Colorspace::lab : Colorspace::ycbcr;
  h.width = 0;
  h.height = 0;
  for (int i = 0; i < 4; ++i) h.width |= static_cast<std::uint32_t>(data[6 + i]) << (8 * i);
  for (int i = 0; i < 4; ++i) h.height |= static_cast<std::uint32_t>(data[10 + i]) << (8 * i);
  h.quality = data[14];
  h.model_id = 0;
  for (int i = 0; i < 8; ++i) h.model_id |= static_cast<std::uint64_t>(data[15 + i]) << (8 * i);
  check_header(h, ErrorKind::format);
  return h;
}

}  // namespace bcn
