#include "core/codec.hpp"

#include "core/bitstream.hpp"
#include "core/huffman.hpp"

namespace bcn {

ReconBuffer::ReconBuffer(int blocks_x, int blocks_y) : bx_(blocks_x), by_(blocks_y) {
  if (blocks_x < 1 || blocks_y < 1) fail(ErrorKind::argument, "empty block grid");
  blocks_.resize(static_cast<std::size_t>(blocks_x) * blocks_y);
  written_.assign(blocks_.size(), 0);
}

bool ReconBuffer::written(int bx, int by) const {
  return in_range(bx, by) && written_[static_cast<std::size_t>(by) * bx_ + bx] != 0;
}

const Block8& ReconBuffer::get(int bx, int by) const {
  if (!in_range(bx, by)) fail(ErrorKind::argument, "block read out of range");
  std::size_t i = static_cast<std::size_t>(by) * bx_ + bx;
  if (!written_[i]) {
    fail(ErrorKind::internal, "sequencing violation: block (" + std::to_string(bx) + "," +
                                  std::to_string(by) + ") read before write");
  }
  return blocks_[i];
}

void ReconBuffer::put(int bx, int by, const Block8& b) {
  if (!in_range(bx, by)) fail(ErrorKind::argument, "block write out of range");
  std::size_t i = static_cast<std::size_t>(by) * bx_ + bx;
  blocks_[i] = b;
  written_[i] = 1;
}

Block8 predict_block(const ReconBuffer& recon, int bx, int by, Network* model_or_off) {
  if (!recon.in_range(bx, by)) fail(ErrorKind::argument, "prediction target out of range");
  if (!model_or_off) {
    Block8 b;
    b.samples.fill(128);
    return b;
  }
  Context24 ctx = build_causal_context(bx, by, [&](int nbx, int nby, Block8* out) {
    if (!recon.in_range(nbx, nby)) return false;
    *out = recon.get(nbx, nby);
    return true;
  });
  return infer_pred(*model_or_off, apply_causal_mask(ctx));
}

namespace {

// Identical on both sides: dequantize, inverse transform, add prediction,
// clamp and round into bytes.
void reconstruct_channel(const CoeffBlock& cb, const QuantTable& qt, const Block8& pred, int ch,
                         Block8& out) {
  DctBlock pix = idct_8x8(dequantize_block(cb, qt));
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 8; ++x) {
      out.at(ch, x, y) = clamp_byte(round_half_away(pix[y * 8 + x] + pred.at(ch, x, y)));
    }
  }
}

}  // namespace

std::vector<std::uint8_t> encode_image(const RasterImage& rgb, int quality, Colorspace cs,
                                       const Model* model, const CodecHooks* hooks) {
  if (quality < 1 || quality > 100) fail(ErrorKind::argument, "quality must be in 1..100");
  if (cs != Colorspace::ycbcr && cs != Colorspace::lab) {
    fail(ErrorKind::argument, "coding colorspace must be YCbCr or Lab");
  }
  Network* net = nullptr;
  if (model) {
    net = const_cast<Network*>(&model->net);
    if (net->config().variant != Variant::pred) {
      fail(ErrorKind::model, "the compression predictor needs a PRED model");
    }
  }

  ByteImage padded = pad_to_block_multiple(quantize_image(convert_colorspace(rgb, cs)));
  QuantTable luma, chroma;
  build_quant_tables(quality, luma, chroma);

  ReconBuffer recon(padded.blocks_x(), padded.blocks_y());
  BitWriter writer;
  int dc_pred[3] = {0, 0, 0};

  for (int by = 0; by < padded.blocks_y(); ++by) {
    for (int bx = 0; bx < padded.blocks_x(); ++bx) {
      Block8 pred = predict_block(recon, bx, by, net);
      Block8 orig = extract_block(padded, bx, by);
      Block8 rec;
      for (int ch = 0; ch < 3; ++ch) {
        const QuantTable& qt = ch == 0 ? luma : chroma;
        DctBlock residual;
        for (int y = 0; y < 8; ++y) {
          for (int x = 0; x < 8; ++x) {
            residual[y * 8 + x] =
                static_cast<double>(orig.at(ch, x, y)) - static_cast<double>(pred.at(ch, x, y));
          }
        }
        CoeffBlock cb = quantize_block(fdct_8x8(residual), qt);
        dc_pred[ch] = entropy_encode_block(cb, dc_pred[ch],
                                           ch == 0 ? ChannelClass::luma : ChannelClass::chroma,
                                           writer);
        reconstruct_channel(cb, qt, pred, ch, rec);
      }
      recon.put(bx, by, rec);
      if (hooks && hooks->on_block) hooks->on_block(bx, by, rec);
    }
  }

  ContainerHeader h;
  h.predictor_on = model != nullptr;
  h.colorspace = cs;
  h.width = static_cast<std::uint32_t>(rgb.width);
  h.height = static_cast<std::uint32_t>(rgb.height);
  h.quality = quality;
  h.model_id = model ? model->id : 0;

  std::vector<std::uint8_t> out = serialize_header(h);
  std::vector<std::uint8_t> scan = writer.finish();
  out.insert(out.end(), scan.begin(), scan.end());
  return out;
}

RasterImage decode_image(const std::uint8_t* data, std::size_t size, const Model* model,
                         const CodecHooks* hooks) {
  ContainerHeader h = parse_header(data, size);
  Network* net = nullptr;
  if (h.predictor_on) {
    if (!model || model->id != h.model_id) {
      fail(ErrorKind::model, "container needs model id " + std::to_string(h.model_id) +
                                 ", which is not available");
    }
    net = const_cast<Network*>(&model->net);
    if (net->config().variant != Variant::pred) {
      fail(ErrorKind::model, "the compression predictor needs a PRED model");
    }
  }

  int width = static_cast<int>(h.width), height = static_cast<int>(h.height);
  int blocks_x = (width + 7) / 8, blocks_y = (height + 7) / 8;
  QuantTable luma, chroma;
  build_quant_tables(h.quality, luma, chroma);

  ReconBuffer recon(blocks_x, blocks_y);
  BitReader reader(data + kContainerHeaderSize, size - kContainerHeaderSize);
  int dc_pred[3] = {0, 0, 0};
  std::vector<Block8> blocks;
  blocks.reserve(static_cast<std::size_t>(blocks_x) * blocks_y);

  for (int by = 0; by < blocks_y; ++by) {
    for (int bx = 0; bx < blocks_x; ++bx) {
      Block8 pred = predict_block(recon, bx, by, net);
      Block8 rec;
      for (int ch = 0; ch < 3; ++ch) {
        CoeffBlock cb = entropy_decode_block(
            reader, dc_pred[ch], ch == 0 ? ChannelClass::luma : ChannelClass::chroma, &dc_pred[ch]);
        reconstruct_channel(cb, ch == 0 ? luma : chroma, pred, ch, rec);
      }
      recon.put(bx, by, rec);
      blocks.push_back(rec);
      if (hooks && hooks->on_block) hooks->on_block(bx, by, rec);
    }
  }

  // Only the 1-padding of the final byte may remain.
  if (reader.bit_size() - reader.bit_pos() >= 8) {
    fail(ErrorKind::format, "scan has trailing bytes past the last block");
  }
  while (reader.bit_pos() < reader.bit_size()) {
    if (reader.get(1) != 1) fail(ErrorKind::format, "scan padding bits are not 1s");
  }

  ByteImage img = assemble_blocks(blocks, blocks_x, blocks_y, width, height, h.colorspace);
  return convert_colorspace(dequantize_image(img), Colorspace::rgb);
}

RasterImage decode_image(const std::vector<std::uint8_t>& bytes, const Model* model,
                         const CodecHooks* hooks) {
  return decode_image(bytes.data(), bytes.size(), model, hooks);
}

}  // namespace bcn
