// 8x8 forward/inverse DCT with JPEG normalization (constant block c has DC 8c).
#pragma once

#include <array>

namespace bcn {

using DctBlock = std::array<double, 64>;  // row-major 8x8

DctBlock fdct_8x8(const DctBlock& block);
DctBlock idct_8x8(const DctBlock& coeffs);

}  // namespace bcn
