// Baseline Huffman coding of coefficient blocks with the standard default
// tables. DC is coded differentially per channel, AC as (run,size) symbols
// with ZRL and EOB.
#pragma once

#include "core/bitstream.hpp"
#include "core/jpeg_core.hpp"

namespace bcn {

// Encodes one block; returns the DC predictor for the next block (the
// block's own DC).
int entropy_encode_block(const CoeffBlock& cb, int dc_pred, ChannelClass cls, BitWriter& out);

// Exact inverse. Throws a format error on an invalid prefix or truncation,
// naming the bit offset.
CoeffBlock entropy_decode_block(BitReader& in, int dc_pred, ChannelClass cls, int* new_dc_pred);

// Magnitude category: 0 for 0, else bit length of |v|.
int coeff_category(int v);

}  // namespace bcn
