#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/checkpoint.hpp"
#include "core/image.hpp"
#include "core/network.hpp"

namespace bcn {

// Byte <-> network domain: x/127.5 - 1 maps [0,255] onto [-1,1].
inline float to_network_domain(std::uint8_t v) {
  return static_cast<float>(v) / 127.5f - 1.0f;
}
inline std::uint8_t from_network_domain(float v) {
  float c = clamp(v, -1.0f, 1.0f);
  return clamp_byte(round_half_away((static_cast<double>(c) + 1.0) * 127.5));
}

// Keeps the four causal blocks (top-left, top, top-right, left); the centre
// and the remaining four become byte 128, which is network-domain zero.
Context24 apply_causal_mask(const Context24& ctx);

Tensor contexts_to_tensor(const std::vector<Context24>& ctxs);  // Nx3x24x24

// Artifact removal: the network output is a residual added to the degraded
// centre block, all in network domain.
Block8 infer_ar(Network& net, const Context24& ctx);
std::vector<Block8> infer_ar_batch(Network& net, const std::vector<Context24>& ctxs);

// Causal prediction: direct output, context must already be masked.
Block8 infer_pred(Network& net, const Context24& masked_ctx);
std::vector<Block8> infer_pred_batch(Network& net, const std::vector<Context24>& ctxs);

// A loaded network plus the content hash of its checkpoint bytes.
struct Model {
  Network net;
  std::uint64_t id = 0;
};

Model load_model_bytes(const std::vector<std::uint8_t>& bytes);
Model load_model_file(const std::string& path);

// Training-pair construction. Both images must be block-aligned and share
// dims; `degraded` is the baseline JPEG round-trip of `clean` at the
// training quality. AR input is the full degraded context; PRED input is
// the causally masked degraded context with out-of-image neighbour blocks
// filled with byte 128. The target is always the clean centre block.
void make_training_pair_from(const ByteImage& clean, const ByteImage& degraded, int bx, int by,
                             Variant variant, Context24* input, Block8* target);

// Convenience form that runs the round-trip itself (pads to block multiple
// first, so all block positions of the padded grid are valid).
void make_training_pair(const ByteImage& clean, int quality, int bx, int by, Variant variant,
                        Context24* input, Block8* target);

// Causal context used by both the codec and PRED pair generation: block
// (nx, ny) of the 3x3 neighbourhood is copied from `fetch` when available,
// otherwise filled with byte 128.
template <typename FetchBlock>
Context24 build_causal_context(int bx, int by, FetchBlock&& fetch) {
  Context24 ctx;
  ctx.bx = bx;
  ctx.by = by;
  ctx.samples.fill(128);
  for (int ny = -1; ny <= 1; ++ny) {
    for (int nx = -1; nx <= 1; ++nx) {
      if (ny > 0 || (ny == 0 && nx >= 0)) continue;  // only causal positions
      Block8 b;
      if (!fetch(bx + nx, by + ny, &b)) continue;
      for (int ch = 0; ch < 3; ++ch) {
        for (int y = 0; y < 8; ++y) {
          for (int x = 0; x < 8; ++x) {
            ctx.at(ch, (nx + 1) * 8 + x, (ny + 1) * 8 + y) = b.at(ch, x, y);
          }
        }
      }
    }
  }
  return ctx;
}

}  // namespace bcn
