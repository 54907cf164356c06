#pragma once

#include <functional>
#include <vector>

#include "core/container.hpp"
#include "core/image.hpp"
#include "core/model.hpp"

namespace bcn {

// Grid of reconstructed blocks shared by encoder and decoder. Blocks are
// written in raster order and may only be read after they were written.
class ReconBuffer {
 public:
  ReconBuffer(int blocks_x, int blocks_y);

  int blocks_x() const { return bx_; }
  int blocks_y() const { return by_; }
  bool in_range(int bx, int by) const { return bx >= 0 && by >= 0 && bx < bx_ && by < by_; }
  bool written(int bx, int by) const;

  const Block8& get(int bx, int by) const;  // sequencing error if unwritten
  void put(int bx, int by, const Block8& b);

 private:
  int bx_, by_;
  std::vector<Block8> blocks_;
  std::vector<std::uint8_t> written_;
};

// Called after each block's reconstruction lands in the ReconBuffer, on
// both the encode and decode side; lets tests verify lockstep.
struct CodecHooks {
  std::function<void(int bx, int by, const Block8& recon)> on_block;
};

// Prediction for block (bx,by): constant 128 with the predictor off,
// otherwise infer_pred on the causally masked context built from recon
// (out-of-image neighbours are byte 128).
Block8 predict_block(const ReconBuffer& recon, int bx, int by, Network* model_or_off);

// Compresses an RGB image. `cs` picks the coding colorspace (YCbCr or
// Lab); a non-null model turns the predictor on and must be a PRED model
// configured for `cs`. Returns header || entropy scan.
std::vector<std::uint8_t> encode_image(const RasterImage& rgb, int quality, Colorspace cs,
                                       const Model* model, const CodecHooks* hooks = nullptr);

// Inverse; returns an RGB image of the header's original dimensions.
// `model` must resolve the header's model_id when the predictor is on.
RasterImage decode_image(const std::uint8_t* data, std::size_t size, const Model* model,
                         const CodecHooks* hooks = nullptr);
RasterImage decode_image(const std::vector<std::uint8_t>& bytes, const Model* model,
                         const CodecHooks* hooks = nullptr);

}  // namespace bcn
