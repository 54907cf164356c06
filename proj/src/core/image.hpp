// Image representation, PPM I/O, colorspace transforms and 8x8 block access.
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "core/common.hpp"

namespace bcn {

enum class Colorspace : std::uint8_t { rgb = 0, ycbcr = 1, lab = 2 };

const char* colorspace_name(Colorspace cs);

// Planar float image, three planes of width*height samples.
// RGB/YCbCr samples live in [0,1]; Lab stores L/100 in plane 0 and a/128,
// b/128 in planes 1-2.
struct RasterImage {
  int width = 0;
  int height = 0;
  Colorspace colorspace = Colorspace::rgb;
  std::array<std::vector<float>, 3> planes;

  RasterImage() = default;
  RasterImage(int w, int h, Colorspace cs);

  float& at(int plane, int x, int y) { return planes[plane][static_cast<std::size_t>(y) * width + x]; }
  float at(int plane, int x, int y) const { return planes[plane][static_cast<std::size_t>(y) * width + x]; }
};

// 8-bit interchange image used by everything block-level. Same plane layout.
struct ByteImage {
  int width = 0;
  int height = 0;
  Colorspace colorspace = Colorspace::rgb;
  std::array<std::vector<std::uint8_t>, 3> planes;

  ByteImage() = default;
  ByteImage(int w, int h, Colorspace cs);

  std::uint8_t& at(int plane, int x, int y) { return planes[plane][static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t at(int plane, int x, int y) const { return planes[plane][static_cast<std::size_t>(y) * width + x]; }

  int blocks_x() const { return (width + 7) / 8; }
  int blocks_y() const { return (height + 7) / 8; }
};

// One 8x8x3 block, channel-major.
struct Block8 {
  std::array<std::uint8_t, 3 * 64> samples{};

  std::uint8_t& at(int ch, int x, int y) { return samples[ch * 64 + y * 8 + x]; }
  std::uint8_t at(int ch, int x, int y) const { return samples[ch * 64 + y * 8 + x]; }
  bool operator==(const Block8&) const = default;
};

// A block plus its eight neighbours: 24x24x3, channel-major, with the
// coordinates of the centre block.
struct Context24 {
  std::array<std::uint8_t, 3 * 24 * 24> samples{};
  int bx = 0;
  int by = 0;

  std::uint8_t& at(int ch, int x, int y) { return samples[ch * 576 + y * 24 + x]; }
  std::uint8_t at(int ch, int x, int y) const { return samples[ch * 576 + y * 24 + x]; }
  Block8 center() const;
  bool operator==(const Context24&) const = default;
};

// --- PPM (binary P6, maxval 255) ---
RasterImage load_ppm(const std::uint8_t* data, std::size_t size);
RasterImage load_ppm(const std::vector<std::uint8_t>& bytes);
RasterImage load_ppm_file(const std::string& path);
std::vector<std::uint8_t> save_ppm(const RasterImage& img);
void save_ppm_file(const RasterImage& img, const std::string& path);

// --- colorspace ---
RasterImage convert_colorspace(const RasterImage& img, Colorspace target);

// --- float <-> byte interchange ---
// Quantizes once at pipeline entry; rounding is half away from zero.
ByteImage quantize_image(const RasterImage& img);
RasterImage dequantize_image(const ByteImage& img);

// --- block plumbing ---
ByteImage pad_to_block_multiple(const ByteImage& img);
RasterImage pad_to_block_multiple(const RasterImage& img);

// 24x24 window centred on block (bx, by); out-of-image pixels replicate the
// nearest edge pixel.
Context24 extract_context(const ByteImage& img, int bx, int by);

Block8 extract_block(const ByteImage& img, int bx, int by);  // block-aligned region must be inside

// Rebuilds an image from its block grid, cropping to width x height.
ByteImage assemble_blocks(const std::vector<Block8>& blocks, int blocks_x, int blocks_y,
                          int width, int height, Colorspace cs);

}  // namespace bcn
