#pragma once

#include <cstdint>
#include <vector>

#include "core/image.hpp"

namespace bcn {

// 23-byte container header: magic "BCN1", version byte (1), flags byte
// (bit0 predictor-on, bits1-2 colorspace: 0=YCbCr 1=Lab), width u32,
// height u32 (original, pre-padding, little-endian), quality byte,
// model_id u64 (checkpoint content hash; zero iff predictor off).
struct ContainerHeader {
  bool predictor_on = false;
  Colorspace colorspace = Colorspace::ycbcr;
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  int quality = 0;
  std::uint64_t model_id = 0;
};

constexpr std::size_t kContainerHeaderSize = 23;

std::vector<std::uint8_t> serialize_header(const ContainerHeader& h);
ContainerHeader parse_header(const std::uint8_t* data, std::size_t size);

}  // namespace bcn
