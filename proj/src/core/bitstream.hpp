// MSB-first bit I/O for the entropy scan.
#pragma once

#include <cstdint>
#include <vector>

#include "core/common.hpp"

namespace bcn {

class BitWriter {
 public:
  void put(std::uint32_t code, int nbits);
  // Pads the final partial byte with 1-bits and returns the stream.
  std::vector<std::uint8_t> finish();
  std::size_t bit_count() const { return bytes_.size() * 8 + nbits_; }

 private:
  std::vector<std::uint8_t> bytes_;
  std::uint32_t acc_ = 0;
  int nbits_ = 0;
};

class BitReader {
 public:
  BitReader(const std::uint8_t* data, std::size_t size) : data_(data), size_(size) {}

  // Reads n bits (n <= 25), MSB first. Throws a format error past the end.
  std::uint32_t get(int nbits);
  std::uint32_t peek_bit();  // 1-bit lookahead without consuming
  std::size_t bit_pos() const { return pos_; }
  std::size_t bit_size() const { return size_ * 8; }

 private:
  const std::uint8_t* data_;
  std::size_t size_;
  std::size_t pos_ = 0;  // in bits
};

}  // namespace bcn
