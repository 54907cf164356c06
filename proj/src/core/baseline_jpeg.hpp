// Standalone baseline JPEG block transform coding, used as the reference
// path the predictive codec must reduce to with prediction off, and for
// building degraded training images. Scan layout: blocks in raster order,
// channels 0,1,2 within each block, per-channel DC predictors reset once at
// stream start, final byte 1-padded. No markers, no headers.
#pragma once

#include <vector>

#include "core/image.hpp"
#include "core/jpeg_core.hpp"

namespace bcn {

// img must be block-aligned (pad first). Returns the entropy scan.
std::vector<std::uint8_t> baseline_encode_scan(const ByteImage& img, int quality);

// Inverse of baseline_encode_scan; dims give the padded size.
ByteImage baseline_decode_scan(const std::uint8_t* data, std::size_t size, int width, int height,
                               Colorspace cs, int quality);

// Lossy round trip without the (lossless) entropy stage. Pads internally and
// crops back, so any image size works. Pixel-identical to
// decode_scan(encode_scan(pad(img))) cropped.
ByteImage baseline_roundtrip(const ByteImage& img, int quality);

}  // namespace bcn
