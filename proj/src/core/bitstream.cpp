#include "core/bitstream.hpp"

namespace bcn {

void BitWriter::put(std::uint32_t code, int nbits) {
  acc_ = (acc_ << nbits) | (code & ((1u << nbits) - 1u));
  nbits_ += nbits;
  while (nbits_ >= 8) {
    nbits_ -= 8;
    bytes_.push_back(static_cast<std::uint8_t>((acc_ >> nbits_) & 0xFF));
  }
}

std::vector<std::uint8_t> BitWriter::finish() {
  if (nbits_ > 0) {
    int pad = 8 - nbits_;
    put((1u << pad) - 1u, pad);
  }
  std::vector<std::uint8_t> out;
  out.swap(bytes_);
  acc_ = 0;
  nbits_ = 0;
  return out;
}

std::uint32_t BitReader::get(int nbits) {
  if (pos_ + static_cast<std::size_t>(nbits) > size_ * 8) {
    fail(ErrorKind::format, "bitstream: read past end at bit " + std::to_string(pos_));
  }
  std::uint32_t v = 0;
  for (int i = 0; i < nbits; ++i) {
    std::size_t byte = pos_ >> 3;
    int shift = 7 - static_cast<int>(pos_ & 7);
    v = (v << 1) | ((data_[byte] >> shift) & 1u);
    ++pos_;
  }
  return v;
}

std::uint32_t BitReader::peek_bit() {
  if (pos_ >= size_ * 8) {
    fail(ErrorKind::format, "bitstream: read past end at bit " + std::to_string(pos_));
  }
  std::size_t byte = pos_ >> 3;
  int shift = 7 - static_cast<int>(pos_ & 7);
  return (data_[byte] >> shift) & 1u;
}

}  // namespace bcn
