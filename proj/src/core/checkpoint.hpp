#pragma once

#include <cstdint>
#include <vector>

#include "core/network.hpp"

namespace bcn {

// Checkpoint byte format (all integers little-endian):
//   magic "BCKP", version byte (1), variant byte, channels u32,
//   n_res_blocks u32, tensor count u32, then per tensor:
//   name length u32, UTF-8 name, rank byte, dims u32 each, raw f32 data.
std::vector<std::uint8_t> save_checkpoint(Network& net);

// Rebuilds the network from the recorded architecture. Any malformation
// (magic, version, truncation, tensor list mismatch) raises a format error.
Network load_checkpoint(const std::vector<std::uint8_t>& bytes);

// Content hash identifying a checkpoint (FNV-1a, 64-bit).
std::uint64_t checkpoint_id(const std::vector<std::uint8_t>& bytes);

}  // namespace bcn
