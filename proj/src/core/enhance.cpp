#include "core/enhance.hpp"

namespace bcn {

ByteImage enhance_image(const ByteImage& img, Network& net) {
  if (net.config().variant != Variant::ar) {
    fail(ErrorKind::model, "enhance needs an AR model, got " +
                               std::string(variant_name(net.config().variant)));
  }
  if (img.colorspace != net.config().colorspace) {
    fail(ErrorKind::model, std::string("enhance: image is ") + colorspace_name(img.colorspace) +
                               " but the model expects " +
                               colorspace_name(net.config().colorspace));
  }
  int blocks_x = img.blocks_x(), blocks_y = img.blocks_y();
  std::vector<Block8> blocks(static_cast<std::size_t>(blocks_x) * blocks_y);

  // Batches keep peak activation memory modest; contexts only ever read
  // the input image, so grouping does not change the result.
  constexpr int kBatch = 64;
  std::vector<Context24> batch;
  std::vector<std::size_t> slots;
  auto flush = [&]() {
    if (batch.empty()) return;
    std::vector<Block8> out = infer_ar_batch(net, batch);
    for (std::size_t i = 0; i < out.size(); ++i) blocks[slots[i]] = out[i];
    batch.clear();
    slots.clear();
  };
  for (int by = 0; by < blocks_y; ++by) {
    for (int bx = 0; bx < blocks_x; ++bx) {
      batch.push_back(extract_context(img, bx, by));
      slots.push_back(static_cast<std::size_t>(by) * blocks_x + bx);
      if (static_cast<int>(batch.size()) == kBatch) flush();
    }
  }
  flush();
  return assemble_blocks(blocks, blocks_x, blocks_y, img.width, img.height, img.colorspace);
}

RasterImage enhance_image_rgb(const RasterImage& rgb, Network& net) {
  ByteImage in = quantize_image(convert_colorspace(rgb, net.config().colorspace));
  return convert_colorspace(dequantize_image(enhance_image(in, net)), Colorspace::rgb);
}

}  // namespace bcn
