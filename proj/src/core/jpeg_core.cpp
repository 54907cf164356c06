#include "core/jpeg_core.hpp"

#include "core/common.hpp"

namespace bcn {

namespace {

// Standard luminance / chrominance base tables.
constexpr std::uint16_t kLumaBase[64] = {
    16, 11, 10, 16, 24,  40,  51,  61,
    12, 12, 14, 19, 26,  58,  60,  55,
    14, 13, 16, 24, 40,  57,  69,  56,
    14, 17, 22, 29, 51,  87,  80,  62,
    18, 22, 37, 56, 68,  109, 103, 77,
    24, 35, 55, 64, 81,  104, 113, 92,
    49, 64, 78, 87, 103, 121, 120, 101,
    72, 92, 95, 98, 112, 100, 103, 99,
};

constexpr std::uint16_t kChromaBase[64] = {
    17, 18, 24, 47, 99, 99, 99, 99,
    18, 21, 26, 66, 99, 99, 99, 99,
    24, 26, 56, 99, 99, 99, 99, 99,
    47, 66, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99,
};

void scale_table(const std::uint16_t* base, int quality, ChannelClass cls, QuantTable& out) {
  int scale = quality < 50 ? 5000 / quality : 200 - 2 * quality;
  for (int i = 0; i < 64; ++i) {
    int v = (base[i] * scale + 50) / 100;
    out.entries[i] = static_cast<std::uint16_t>(clamp(v, 1, 255));
  }
  out.channel_class = cls;
}

}  // namespace

void build_quant_tables(int quality, QuantTable& luma, QuantTable& chroma) {
  if (quality < 1 || quality > 100) {
    fail(ErrorKind::argument, "quality must be in [1,100], got " + std::to_string(quality));
  }
  scale_table(kLumaBase, quality, ChannelClass::luma, luma);
  scale_table(kChromaBase, quality, ChannelClass::chroma, chroma);
}

CoeffBlock quantize_block(const DctBlock& coeffs, const QuantTable& qt) {
  CoeffBlock out;
  for (int i = 0; i < 64; ++i) {
    int q = round_half_away(coeffs[i] / qt.entries[i]);
    out.coeffs[i] = static_cast<std::int16_t>(clamp(q, -kCoeffClamp, kCoeffClamp));
  }
  return out;
}

DctBlock dequantize_block(const CoeffBlock& cb, const QuantTable& qt) {
  DctBlock out;
  for (int i = 0; i < 64; ++i) out[i] = static_cast<double>(cb.coeffs[i]) * qt.entries[i];
  return out;
}

const std::array<std::uint8_t, 64> kZigzag = {
    0,  1,  5,  6,  14, 15, 27, 28,
    2,  4,  7,  13, 16, 26, 29, 42,
    3,  8,  12, 17, 25, 30, 41, 43,
    9,  11, 18, 24, 31, 40, 44, 53,
    10, 19, 23, 32, 39, 45, 52, 54,
    20, 22, 33, 38, 46, 51, 55, 60,
    21, 34, 37, 47, 50, 56, 59, 61,
    35, 36, 48, 49, 57, 58, 62, 63,
};

const std::array<std::uint8_t, 64> kUnzigzag = [] {
  std::array<std::uint8_t, 64> inv{};
  for (int i = 0; i < 64; ++i) inv[kZigzag[i]] = static_cast<std::uint8_t>(i);
  return inv;
}();

std::array<std::int16_t, 64> zigzag(const std::array<std::int16_t, 64>& natural) {
  std::array<std::int16_t, 64> out;
  for (int i = 0; i < 64; ++i) out[kZigzag[i]] = natural[i];
  return out;
}

std::array<std::int16_t, 64> unzigzag(const std::array<std::int16_t, 64>& scan) {
  std::array<std::int16_t, 64> out;
  for (int i = 0; i < 64; ++i) out[i] = scan[kZigzag[i]];
  return out;
}

}  // namespace bcn
