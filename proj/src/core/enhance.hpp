#pragma once

#include "core/image.hpp"
#include "core/model.hpp"

namespace bcn {

// Applies the AR network to every block. Contexts are read from the input
// image only, so the result is independent of block order. The image must
// be in the model's configured colorspace.
ByteImage enhance_image(const ByteImage& img, Network& net);

// RGB convenience: converts into the model's colorspace and back.
RasterImage enhance_image_rgb(const RasterImage& rgb, Network& net);

}  // namespace bcn
