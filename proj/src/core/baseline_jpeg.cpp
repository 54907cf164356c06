#include "core/baseline_jpeg.hpp"

#include "core/bitstream.hpp"
#include "core/huffman.hpp"

namespace bcn {

namespace {

void check_aligned(const ByteImage& img) {
  if (img.width % 8 != 0 || img.height % 8 != 0) {
    fail(ErrorKind::argument, "baseline scan requires block-aligned dimensions");
  }
}

DctBlock shifted_block(const ByteImage& img, int c, int bx, int by) {
  DctBlock b;
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x)
      b[y * 8 + x] = static_cast<double>(img.at(c, bx * 8 + x, by * 8 + y)) - 128.0;
  return b;
}

void store_block(ByteImage& img, int c, int bx, int by, const DctBlock& recon) {
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x)
      img.at(c, bx * 8 + x, by * 8 + y) = clamp_byte(round_half_away(recon[y * 8 + x] + 128.0));
}

}  // namespace

std::vector<std::uint8_t> baseline_encode_scan(const ByteImage& img, int quality) {
  check_aligned(img);
  QuantTable qt[2];
  build_quant_tables(quality, qt[0], qt[1]);
  BitWriter out;
  int dc_pred[3] = {0, 0, 0};
  for (int by = 0; by < img.height / 8; ++by) {
    for (int bx = 0; bx < img.width / 8; ++bx) {
      for (int c = 0; c < 3; ++c) {
        ChannelClass cls = c == 0 ? ChannelClass::luma : ChannelClass::chroma;
        CoeffBlock cb = quantize_block(fdct_8x8(shifted_block(img, c, bx, by)), qt[c == 0 ? 0 : 1]);
        dc_pred[c] = entropy_encode_block(cb, dc_pred[c], cls, out);
      }
    }
  }
  return out.finish();
}

ByteImage baseline_decode_scan(const std::uint8_t* data, std::size_t size, int width, int height,
                               Colorspace cs, int quality) {
  if (width % 8 != 0 || height % 8 != 0) {
    fail(ErrorKind::argument, "baseline scan requires block-aligned dimensions");
  }
  QuantTable qt[2];
  build_quant_tables(quality, qt[0], qt[1]);
  ByteImage img(width, height, cs);
  BitReader in(data, size);
  int dc_pred[3] = {0, 0, 0};
  for (int by = 0; by < height / 8; ++by) {
    for (int bx = 0; bx < width / 8; ++bx) {
      for (int c = 0; c < 3; ++c) {
        ChannelClass cls = c == 0 ? ChannelClass::luma : ChannelClass::chroma;
        CoeffBlock cb = entropy_decode_block(in, dc_pred[c], cls, &dc_pred[c]);
        store_block(img, c, bx, by, idct_8x8(dequantize_block(cb, qt[c == 0 ? 0 : 1])));
      }
    }
  }
  return img;
}

ByteImage baseline_roundtrip(const ByteImage& img, int quality) {
  ByteImage padded = pad_to_block_multiple(img);
  QuantTable qt[2];
  build_quant_tables(quality, qt[0], qt[1]);
  ByteImage recon(padded.width, padded.height, padded.colorspace);
  for (int by = 0; by < padded.height / 8; ++by) {
    for (int bx = 0; bx < padded.width / 8; ++bx) {
      for (int c = 0; c < 3; ++c) {
        CoeffBlock cb = quantize_block(fdct_8x8(shifted_block(padded, c, bx, by)), qt[c == 0 ? 0 : 1]);
        store_block(recon, c, bx, by, idct_8x8(dequantize_block(cb, qt[c == 0 ? 0 : 1])));
      }
    }
  }
  if (recon.width == img.width && recon.height == img.height) return recon;
  ByteImage out(img.width, img.height, img.colorspace);
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < img.height; ++y)
      for (int x = 0; x < img.width; ++x) out.at(c, x, y) = recon.at(c, x, y);
  return out;
}

}  // namespace bcn
