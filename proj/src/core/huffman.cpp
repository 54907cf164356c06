#include "core/huffman.hpp"

#include <array>
#include <cstring>

namespace bcn {

namespace {

struct TableSpec {
  const std::uint8_t* counts;  // codes per bit length 1..16
  const std::uint8_t* values;
  int n_values;
};

constexpr std::uint8_t kDcLumaCounts[16] = {0, 1, 5, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0};
constexpr std::uint8_t kDcValues[12] = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11};
constexpr std::uint8_t kDcChromaCounts[16] = {0, 3, 1, 1, 1, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0};

constexpr std::uint8_t kAcLumaCounts[16] = {0, 2, 1, 3, 3, 2, 4, 3, 5, 5, 4, 4, 0, 0, 1, 125};
constexpr std::uint8_t kAcLumaValues[162] = {
    0x01, 0x02, 0x03, 0x00, 0x04, 0x11, 0x05, 0x12, 0x21, 0x31, 0x41, 0x06, 0x13, 0x51, 0x61, 0x07,
    0x22, 0x71, 0x14, 0x32, 0x81, 0x91, 0xA1, 0x08, 0x23, 0x42, 0xB1, 0xC1, 0x15, 0x52, 0xD1, 0xF0,
    0x24, 0x33, 0x62, 0x72, 0x82, 0x09, 0x0A, 0x16, 0x17, 0x18, 0x19, 0x1A, 0x25, 0x26, 0x27, 0x28,
    0x29, 0x2A, 0x34, 0x35, 0x36, 0x37, 0x38, 0x39, 0x3A, 0x43, 0x44, 0x45, 0x46, 0x47, 0x48, 0x49,
    0x4A, 0x53, 0x54, 0x55, 0x56, 0x57, 0x58, 0x59, 0x5A, 0x63, 0x64, 0x65, 0x66, 0x67, 0x68, 0x69,
    0x6A, 0x73, 0x74, 0x75, 0x76, 0x77, 0x78, 0x79, 0x7A, 0x83, 0x84, 0x85, 0x86, 0x87, 0x88, 0x89,
    0x8A, 0x92, 0x93, 0x94, 0x95, 0x96, 0x97, 0x98, 0x99, 0x9A, 0xA2, 0xA3, 0xA4, 0xA5, 0xA6, 0xA7,
    0xA8, 0xA9, 0xAA, 0xB2, 0xB3, 0xB4, 0xB5, 0xB6, 0xB7, 0xB8, 0xB9, 0xBA, 0xC2, 0xC3, 0xC4, 0xC5,
    0xC6, 0xC7, 0xC8, 0xC9, 0xCA, 0xD2, 0xD3, 0xD4, 0xD5, 0xD6, 0xD7, 0xD8, 0xD9, 0xDA, 0xE1, 0xE2,
    0xE3, 0xE4, 0xE5, 0xE6, 0xE7, 0xE8, 0xE9, 0xEA, 0xF1, 0xF2, 0xF3, 0xF4, 0xF5, 0xF6, 0xF7, 0xF8,
    0xF9, 0xFA};

constexpr std::uint8_t kAcChromaCounts[16] = {0, 2, 1, 2, 4, 4, 3, 4, 7, 5, 4, 4, 0, 1, 2, 119};
constexpr std::uint8_t kAcChromaValues[162] = {
    0x00, 0x01, 0x02, 0x03, 0x11, 0x04, 0x05, 0x21, 0x31, 0x06, 0x12, 0x41, 0x51, 0x07, 0x61, 0x71,
    0x13, 0x22, 0x32, 0x81, 0x08, 0x14, 0x42, 0x91, 0xA1, 0xB1, 0xC1, 0x09, 0x23, 0x33, 0x52, 0xF0,
    0x15, 0x62, 0x72, 0xD1, 0x0A, 0x16, 0x24, 0x34, 0xE1, 0x25, 0xF1, 0x17, 0x18, 0x19, 0x1A, 0x26,
    0x27, 0x28, 0x29, 0x2A, 0x35, 0x36, 0x37, 0x38, 0x39, 0x3A, 0x43, 0x44, 0x45, 0x46, 0x47, 0x48,
    0x49, 0x4A, 0x53, 0x54, 0x55, 0x56, 0x57, 0x58, 0x59, 0x5A, 0x63, 0x64, 0x65, 0x66, 0x67, 0x68,
    0x69, 0x6A, 0x73, 0x74, 0x75, 0x76, 0x77, 0x78, 0x79, 0x7A, 0x82, 0x83, 0x84, 0x85, 0x86, 0x87,
    0x88, 0x89, 0x8A, 0x92, 0x93, 0x94, 0x95, 0x96, 0x97, 0x98, 0x99, 0x9A, 0xA2, 0xA3, 0xA4, 0xA5,
    0xA6, 0xA7, 0xA8, 0xA9, 0xAA, 0xB2, 0xB3, 0xB4, 0xB5, 0xB6, 0xB7, 0xB8, 0xB9, 0xBA, 0xC2, 0xC3,
    0xC4, 0xC5, 0xC6, 0xC7, 0xC8, 0xC9, 0xCA, 0xD2, 0xD3, 0xD4, 0xD5, 0xD6, 0xD7, 0xD8, 0xD9, 0xDA,
    0xE2, 0xE3, 0xE4, 0xE5, 0xE6, 0xE7, 0xE8, 0xE9, 0xEA, 0xF2, 0xF3, 0xF4, 0xF5, 0xF6, 0xF7, 0xF8,
    0xF9, 0xFA};

struct EncTable {
  std::uint16_t code[256];
  std::uint8_t len[256];
};

struct DecTable {
  // Canonical decode: smallest/largest code and first value index per length.
  std::int32_t mincode[17];
  std::int32_t maxcode[17];  // -1 when no codes of this length
  int valptr[17];
  const std::uint8_t* values;
};

// Canonical code assignment: lengths in table order, codes count upward.
void build_tables(const TableSpec& spec, EncTable& enc, DecTable& dec) {
  std::memset(enc.len, 0, sizeof enc.len);
  std::uint16_t code = 0;
  int k = 0;
  for (int len = 1; len <= 16; ++len) {
    dec.valptr[len] = k;
    dec.mincode[len] = code;
    for (int i = 0; i < spec.counts[len - 1]; ++i) {
      enc.code[spec.values[k]] = code;
      enc.len[spec.values[k]] = static_cast<std::uint8_t>(len);
      ++code;
      ++k;
    }
    dec.maxcode[len] = spec.counts[len - 1] > 0 ? code - 1 : -1;
    code <<= 1;
  }
  dec.values = spec.values;
}

struct Tables {
  EncTable dc_enc[2], ac_enc[2];
  DecTable dc_dec[2], ac_dec[2];
  Tables() {
    build_tables({kDcLumaCounts, kDcValues, 12}, dc_enc[0], dc_dec[0]);
    build_tables({kDcChromaCounts, kDcValues, 12}, dc_enc[1], dc_dec[1]);
    build_tables({kAcLumaCounts, kAcLumaValues, 162}, ac_enc[0], ac_dec[0]);
    build_tables({kAcChromaCounts, kAcChromaValues, 162}, ac_enc[1], ac_dec[1]);
  }
};

const Tables& tables() {
  static const Tables t;
  return t;
}

void put_symbol(BitWriter& out, const EncTable& t, int symbol) {
  if (t.len[symbol] == 0) {
    fail(ErrorKind::internal, "huffman: symbol " + std::to_string(symbol) + " has no code");
  }
  out.put(t.code[symbol], t.len[symbol]);
}

// Amplitude bits: value as-is when positive, value-1 in two's complement
// truncated to the category when negative.
void put_amplitude(BitWriter& out, int v, int category) {
  if (category == 0) return;
  std::uint32_t bits = v >= 0 ? static_cast<std::uint32_t>(v)
                              : static_cast<std::uint32_t>(v + (1 << category) - 1);
  out.put(bits, category);
}

int extend_amplitude(std::uint32_t bits, int category) {
  if (category == 0) return 0;
  if (bits < (1u << (category - 1))) {
    return static_cast<int>(bits) - (1 << category) + 1;
  }
  return static_cast<int>(bits);
}

int decode_symbol(BitReader& in, const DecTable& t) {
  std::size_t start = in.bit_pos();
  std::int32_t code = 0;
  for (int len = 1; len <= 16; ++len) {
    code = (code << 1) | static_cast<std::int32_t>(in.get(1));
    if (t.maxcode[len] >= 0 && code <= t.maxcode[len]) {
      return t.values[t.valptr[len] + (code - t.mincode[len])];
    }
  }
  fail(ErrorKind::format, "bitstream: invalid huffman prefix at bit " + std::to_string(start));
}

}  // namespace

int coeff_category(int v) {
  int m = v < 0 ? -v : v;
  int cat = 0;
  while (m) {
    ++cat;
    m >>= 1;
  }
  return cat;
}

int entropy_encode_block(const CoeffBlock& cb, int dc_pred, ChannelClass cls, BitWriter& out) {
  const Tables& t = tables();
  int ci = cls == ChannelClass::luma ? 0 : 1;

  int diff = cb.coeffs[0] - dc_pred;
  int dc_cat = coeff_category(diff);
  put_symbol(out, t.dc_enc[ci], dc_cat);
  put_amplitude(out, diff, dc_cat);

  auto scan = zigzag(cb.coeffs);
  int run = 0;
  for (int k = 1; k < 64; ++k) {
    int v = scan[k];
    if (v == 0) {
      ++run;
      continue;
    }
    while (run > 15) {
      put_symbol(out, t.ac_enc[ci], 0xF0);  // ZRL
      run -= 16;
    }
    int cat = coeff_category(v);
    put_symbol(out, t.ac_enc[ci], (run << 4) | cat);
    put_amplitude(out, v, cat);
    run = 0;
  }
  if (run > 0) put_symbol(out, t.ac_enc[ci], 0x00);  // EOB

  return cb.coeffs[0];
}

CoeffBlock entropy_decode_block(BitReader& in, int dc_pred, ChannelClass cls, int* new_dc_pred) {
  const Tables& t = tables();
  int ci = cls == ChannelClass::luma ? 0 : 1;

  int dc_cat = decode_symbol(in, t.dc_dec[ci]);
  if (dc_cat > 11) {
    fail(ErrorKind::format, "bitstream: DC category " + std::to_string(dc_cat) + " out of range at bit " +
                                std::to_string(in.bit_pos()));
  }
  int diff = extend_amplitude(in.get(dc_cat), dc_cat);
  int dc = dc_pred + diff;

  std::array<std::int16_t, 64> scan{};
  scan[0] = static_cast<std::int16_t>(dc);
  int k = 1;
  while (k < 64) {
    int sym = decode_symbol(in, t.ac_dec[ci]);
    if (sym == 0x00) break;  // EOB
    if (sym == 0xF0) {       // ZRL
      k += 16;
      if (k > 64) fail(ErrorKind::format, "bitstream: ZRL overruns block at bit " + std::to_string(in.bit_pos()));
      continue;
    }
    int run = sym >> 4;
    int cat = sym & 0x0F;
    k += run;
    if (k > 63) {
      fail(ErrorKind::format, "bitstream: AC run overruns block at bit " + std::to_string(in.bit_pos()));
    }
    scan[k] = static_cast<std::int16_t>(extend_amplitude(in.get(cat), cat));
    ++k;
  }

  CoeffBlock cb;
  cb.coeffs = unzigzag(scan);
  if (new_dc_pred) *new_dc_pred = dc;
  return cb;
}

}  // namespace bcn
