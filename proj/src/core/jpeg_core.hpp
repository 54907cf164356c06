// Quantization tables, coefficient blocks and the zigzag scan.
#pragma once

#include <array>
#include <cstdint>

#include "core/dct.hpp"

namespace bcn {

enum class ChannelClass : std::uint8_t { luma = 0, chroma = 1 };

struct QuantTable {
  std::array<std::uint16_t, 64> entries{};  // natural (row-major) order, each >= 1
  ChannelClass channel_class = ChannelClass::luma;
};

// Quantized DCT coefficients, natural order. Every entry is clamped to
// +-1023 so any DC differential fits Huffman category 11 and the entropy
// layer round-trips exactly.
struct CoeffBlock {
  std::array<std::int16_t, 64> coeffs{};
  bool operator==(const CoeffBlock&) const = default;
};

constexpr int kCoeffClamp = 1023;

// IJG quality scaling of the standard base tables. quality in [1,100].
void build_quant_tables(int quality, QuantTable& luma, QuantTable& chroma);

CoeffBlock quantize_block(const DctBlock& coeffs, const QuantTable& qt);
DctBlock dequantize_block(const CoeffBlock& cb, const QuantTable& qt);

// zigzag[natural index] = scan position; unzigzag inverts.
extern const std::array<std::uint8_t, 64> kZigzag;
extern const std::array<std::uint8_t, 64> kUnzigzag;

std::array<std::int16_t, 64> zigzag(const std::array<std::int16_t, 64>& natural);
std::array<std::int16_t, 64> unzigzag(const std::array<std::int16_t, 64>& scan);

}  // namespace bcn
