#include <cstdint>
#include <random>

#include "core/baseline_jpeg.hpp"
#include "core/bitstream.hpp"
#include "core/huffman.hpp"
#include "core/jpeg_core.hpp"
#include "doctest.h"
#include "support/synth.hpp"

using namespace bcn;

namespace {

template <typename Fn>
ErrorKind kind_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error to be thrown");
  return ErrorKind::internal;
}

// Independent copies of the standard base quantization tables, the oracle
// for the quality scaling test.
constexpr std::array<int, 64> kLumaBase = {
    16, 11, 10, 16, 24,  40,  51,  61,   //
    12, 12, 14, 19, 26,  58,  60,  55,   //
    14, 13, 16, 24, 40,  57,  69,  56,   //
    14, 17, 22, 29, 51,  87,  80,  62,   //
    18, 22, 37, 56, 68,  109, 103, 77,   //
    24, 35, 55, 64, 81,  104, 113, 92,   //
    49, 64, 78, 87, 103, 121, 120, 101,  //
    72, 92, 95, 98, 112, 100, 103, 99};
constexpr std::array<int, 64> kChromaBase = {
    17, 18, 24, 47, 99, 99, 99, 99,  //
    18, 21, 26, 66, 99, 99, 99, 99,  //
    24, 26, 56, 99, 99, 99, 99, 99,  //
    47, 66, 99, 99, 99, 99, 99, 99,  //
    99, 99, 99, 99, 99, 99, 99, 99,  //
    99, 99, 99, 99, 99, 99, 99, 99,  //
    99, 99, 99, 99, 99, 99, 99, 99,  //
    99, 99, 99, 99, 99, 99, 99, 99};

int ijg_scaled(int base, int quality) {
  int scale = quality < 50 ? 5000 / quality : 200 - 2 * quality;
  int v = (base * scale + 50) / 100;
  return v < 1 ? 1 : (v > 255 ? 255 : v);
}

CoeffBlock random_coeffs(std::mt19937_64& rng, int nonzero_prob_percent) {
  CoeffBlock cb;
  for (auto& c : cb.coeffs) {
    if (static_cast<int>(rng() % 100) < nonzero_prob_percent) {
      c = static_cast<std::int16_t>(static_cast<int>(rng() % (2 * kCoeffClamp + 1)) - kCoeffClamp);
    } else {
      c = 0;
    }
  }
  return cb;
}

}  // namespace

TEST_SUITE("jpeg") {
  TEST_CASE("quality 50 reproduces the base tables") {
    QuantTable luma, chroma;
    build_quant_tables(50, luma, chroma);
    for (int i = 0; i < 64; ++i) {
      CHECK(luma.entries[i] == kLumaBase[i]);
      CHECK(chroma.entries[i] == kChromaBase[i]);
    }
    CHECK(luma.channel_class == ChannelClass::luma);
    CHECK(chroma.channel_class == ChannelClass::chroma);
  }

  TEST_CASE("quality 20: scale 250, base 16 -> 40; full tables match the formula") {
    QuantTable luma, chroma;
    build_quant_tables(20, luma, chroma);
    CHECK(luma.entries[0] == 40);
    for (int i = 0; i < 64; ++i) {
      CHECK(luma.entries[i] == ijg_scaled(kLumaBase[i], 20));
      CHECK(chroma.entries[i] == ijg_scaled(kChromaBase[i], 20));
    }
  }

  TEST_CASE("quality 100: every entry clamps up to 1") {
    QuantTable luma, chroma;
    build_quant_tables(100, luma, chroma);
    for (int i = 0; i < 64; ++i) {
      CHECK(luma.entries[i] == 1);
      CHECK(chroma.entries[i] == 1);
    }
  }

  TEST_CASE("whole quality range matches the formula and stays in 1..255") {
    for (int q = 1; q <= 100; ++q) {
      QuantTable luma, chroma;
      build_quant_tables(q, luma, chroma);
      for (int i = 0; i < 64; ++i) {
        CHECK(luma.entries[i] == ijg_scaled(kLumaBase[i], q));
        CHECK(chroma.entries[i] == ijg_scaled(kChromaBase[i], q));
        CHECK(luma.entries[i] >= 1);
        CHECK(luma.entries[i] <= 255);
      }
    }
  }

  TEST_CASE("table entries shrink (weakly) as quality grows") {
    QuantTable pl, pc;
    build_quant_tables(1, pl, pc);
    for (int q = 2; q <= 100; ++q) {
      QuantTable l, c;
      build_quant_tables(q, l, c);
      for (int i = 0; i < 64; ++i) {
        CHECK(l.entries[i] <= pl.entries[i]);
        CHECK(c.entries[i] <= pc.entries[i]);
      }
      pl = l;
      pc = c;
    }
  }

  TEST_CASE("quality out of range is an argument error") {
    QuantTable l, c;
    CHECK(kind_of([&] { build_quant_tables(0, l, c); }) == ErrorKind::argument);
    CHECK(kind_of([&] { build_quant_tables(101, l, c); }) == ErrorKind::argument);
  }

  TEST_CASE("quantize: stated rounding and clamping") {
    QuantTable qt;
    qt.entries.fill(10);
    DctBlock x{};
    x[1] = 37.0;
    x[2] = -35.0;
    x[3] = 35.0;   // exactly half -> away from zero
    x[4] = 34.9;
    CoeffBlock cb = quantize_block(x, qt);
    CHECK(cb.coeffs[1] == 4);
    CHECK(cb.coeffs[2] == -4);
    CHECK(cb.coeffs[3] == 4);
    CHECK(cb.coeffs[4] == 3);

    QuantTable ones;
    ones.entries.fill(1);
    DctBlock big{};
    big[5] = 20000.0;
    big[6] = -20000.0;
    big[0] = 1e6;
    CoeffBlock clamped = quantize_block(big, ones);
    CHECK(clamped.coeffs[5] == kCoeffClamp);
    CHECK(clamped.coeffs[6] == -kCoeffClamp);
    CHECK(clamped.coeffs[0] == kCoeffClamp);  // DC clamps to the same bound
  }

  TEST_CASE("quantize is odd and monotone per entry") {
    QuantTable qt;
    for (int i = 0; i < 64; ++i) qt.entries[i] = static_cast<std::uint16_t>(1 + (i * 7) % 50);
    std::mt19937_64 rng(3);
    for (int iter = 0; iter < 500; ++iter) {
      DctBlock x;
      for (double& v : x) v = synth::uniform(rng, -2000.0, 2000.0);
      DctBlock nx;
      for (int i = 0; i < 64; ++i) nx[i] = -x[i];
      CoeffBlock q = quantize_block(x, qt), nq = quantize_block(nx, qt);
      for (int i = 0; i < 64; ++i) CHECK(nq.coeffs[i] == -q.coeffs[i]);

      DctBlock y;
      for (int i = 0; i < 64; ++i) y[i] = x[i] + synth::uniform(rng, 0.0, 200.0);
      CoeffBlock qy = quantize_block(y, qt);
      for (int i = 0; i < 64; ++i) CHECK(qy.coeffs[i] >= q.coeffs[i]);
    }
  }

  TEST_CASE("dequantize is the entrywise product and quantize undoes it") {
    QuantTable qt;
    qt.entries.fill(10);
    CoeffBlock cb{};
    cb.coeffs[0] = 4;
    DctBlock d = dequantize_block(cb, qt);
    CHECK(d[0] == doctest::Approx(40.0));
    for (int i = 1; i < 64; ++i) CHECK(d[i] == doctest::Approx(0.0));

    CoeffBlock zero{};
    DctBlock dz = dequantize_block(zero, qt);
    for (double v : dz) CHECK(v == doctest::Approx(0.0));

    // quantize(dequantize(x)) == x within the clamp range, exhaustively
    // over random blocks and all table entries used by the codec
    std::mt19937_64 rng(17);
    for (int iter = 0; iter < 1000; ++iter) {
      QuantTable rt;
      for (auto& e : rt.entries) e = static_cast<std::uint16_t>(1 + rng() % 255);
      CoeffBlock x = random_coeffs(rng, 60);
      CoeffBlock back = quantize_block(dequantize_block(x, rt), rt);
      CHECK(back == x);
    }
  }

  TEST_CASE("zigzag: standard order and inverse") {
    CHECK(kZigzag[1] == 1);   // natural (row 0, col 1)
    CHECK(kZigzag[8] == 2);   // natural (row 1, col 0)
    CHECK(kZigzag[0] == 0);
    CHECK(kZigzag[63] == 63);
    // first positions of the standard scan, as natural indices
    const std::array<int, 16> head = {0, 1, 8, 16, 9, 2, 3, 10, 17, 24, 32, 25, 18, 11, 4, 5};
    for (int s = 0; s < 16; ++s) CHECK(kUnzigzag[s] == head[s]);
    for (int i = 0; i < 64; ++i) {
      CHECK(kUnzigzag[kZigzag[i]] == i);
      CHECK(kZigzag[kUnzigzag[i]] == i);
    }
  }

  TEST_CASE("zigzag round trip on random data") {
    std::mt19937_64 rng(5);
    for (int iter = 0; iter < 100; ++iter) {
      std::array<std::int16_t, 64> natural;
      for (auto& v : natural) v = static_cast<std::int16_t>(rng());
      CHECK(unzigzag(zigzag(natural)) == natural);
      CHECK(zigzag(unzigzag(natural)) == natural);
    }
  }

  TEST_CASE("baseline scan decode inverts encode pixel-exactly") {
    for (Colorspace cs : {Colorspace::ycbcr, Colorspace::lab}) {
      RasterImage rgb = synth::make_image(31, 40, 32);
      ByteImage img = quantize_image(convert_colorspace(rgb, cs));
      for (int q : {10, 50, 90}) {
        auto scan = baseline_encode_scan(img, q);
        ByteImage dec = baseline_decode_scan(scan.data(), scan.size(), 40, 32, cs, q);
        ByteImage ref = baseline_roundtrip(img, q);
        CHECK(dec.planes == ref.planes);
      }
    }
  }

  TEST_CASE("baseline roundtrip pads and crops odd sizes") {
    RasterImage rgb = synth::make_image(32, 41, 27);
    ByteImage img = quantize_image(convert_colorspace(rgb, Colorspace::ycbcr));
    ByteImage rt = baseline_roundtrip(img, 50);
    CHECK(rt.width == 41);
    CHECK(rt.height == 27);
    ByteImage padded = pad_to_block_multiple(img);
    auto scan = baseline_encode_scan(padded, 50);
    ByteImage dec = baseline_decode_scan(scan.data(), scan.size(), padded.width, padded.height,
                                         Colorspace::ycbcr, 50);
    for (int c = 0; c < 3; ++c)
      for (int y = 0; y < 27; ++y)
        for (int x = 0; x < 41; ++x) CHECK(rt.at(c, x, y) == dec.at(c, x, y));
  }

  TEST_CASE("baseline scan rate grows with quality on aggregate") {
    std::size_t q10 = 0, q50 = 0, q90 = 0;
    for (std::uint64_t seed = 60; seed < 66; ++seed) {
      ByteImage img = quantize_image(
          convert_colorspace(synth::make_image(seed, 64, 48), Colorspace::ycbcr));
      q10 += baseline_encode_scan(img, 10).size();
      q50 += baseline_encode_scan(img, 50).size();
      q90 += baseline_encode_scan(img, 90).size();
    }
    CHECK(q10 < q50);
    CHECK(q50 < q90);
  }

  TEST_CASE("higher quality reconstructs closer to the source") {
    ByteImage img =
        quantize_image(convert_colorspace(synth::make_image(70, 64, 48), Colorspace::ycbcr));
    auto sse = [&](const ByteImage& other) {
      long long acc = 0;
      for (int c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < img.planes[c].size(); ++i) {
          long long d = static_cast<long long>(img.planes[c][i]) - other.planes[c][i];
          acc += d * d;
        }
      return acc;
    };
    CHECK(sse(baseline_roundtrip(img, 90)) < sse(baseline_roundtrip(img, 20)));
  }

  TEST_CASE("unusable baseline decode input raises a format error") {
    CHECK(kind_of([] {
      std::uint8_t junk[1] = {0x00};  // EOB-only stream is too short for 6 blocks
      baseline_decode_scan(junk, 1, 16, 16, Colorspace::ycbcr, 50);
    }) == ErrorKind::format);
  }
}

TEST_SUITE("huffman") {
  TEST_CASE("bit writer packs MSB first and pads with 1-bits") {
    BitWriter w;
    w.put(0b101, 3);
    w.put(0b0011, 4);
    CHECK(w.bit_count() == 7);
    auto bytes = w.finish();
    REQUIRE(bytes.size() == 1);
    CHECK(bytes[0] == 0b10100111);  // 101 0011 then one pad bit

    BitWriter full;
    full.put(0xAB, 8);
    full.put(0xCD, 8);
    auto two = full.finish();
    CHECK(two == std::vector<std::uint8_t>{0xAB, 0xCD});
  }

  TEST_CASE("bit reader mirrors the writer") {
    BitWriter w;
    std::mt19937_64 rng(1);
    std::vector<std::pair<std::uint32_t, int>> chunks;
    for (int i = 0; i < 500; ++i) {
      int n = 1 + static_cast<int>(rng() % 24);
      std::uint32_t v = static_cast<std::uint32_t>(rng()) & ((1u << n) - 1);
      chunks.emplace_back(v, n);
      w.put(v, n);
    }
    auto bytes = w.finish();
    BitReader r(bytes.data(), bytes.size());
    for (auto [v, n] : chunks) CHECK(r.get(n) == v);
  }

  TEST_CASE("peek does not consume; reading past the end is a format error") {
    std::uint8_t one = 0b10000000;
    BitReader r(&one, 1);
    CHECK(r.peek_bit() == 1);
    CHECK(r.peek_bit() == 1);
    CHECK(r.bit_pos() == 0);
    CHECK(r.get(1) == 1);
    CHECK(r.get(7) == 0);
    CHECK(kind_of([&] { r.get(1); }) == ErrorKind::format);
  }

  TEST_CASE("coefficient categories at the edges") {
    CHECK(coeff_category(0) == 0);
    CHECK(coeff_category(1) == 1);
    CHECK(coeff_category(-1) == 1);
    CHECK(coeff_category(2) == 2);
    CHECK(coeff_category(3) == 2);
    CHECK(coeff_category(4) == 3);
    CHECK(coeff_category(-7) == 3);
    CHECK(coeff_category(255) == 8);
    CHECK(coeff_category(256) == 9);
    CHECK(coeff_category(511) == 9);
    CHECK(coeff_category(512) == 10);
    CHECK(coeff_category(1023) == 10);
    CHECK(coeff_category(-1023) == 10);
    CHECK(coeff_category(1024) == 11);
    CHECK(coeff_category(2047) == 11);
  }

  TEST_CASE("luma DC 0 + empty AC encodes as the documented 6 bits") {
    CoeffBlock cb{};
    BitWriter w;
    int next = entropy_encode_block(cb, 0, ChannelClass::luma, w);
    CHECK(next == 0);
    CHECK(w.bit_count() == 6);  // DC category 0 = "00", EOB = "1010"
    auto bytes = w.finish();
    REQUIRE(bytes.size() == 1);
    CHECK(bytes[0] == 0b00101011);  // 00 1010 + two pad 1-bits
  }

  TEST_CASE("documented 6 bits decode back to the all-zero block") {
    std::uint8_t byte = 0b00101011;
    BitReader r(&byte, 1);
    int next = 0;
    CoeffBlock cb = entropy_decode_block(r, 0, ChannelClass::luma, &next);
    CHECK(next == 0);
    CHECK(cb == CoeffBlock{});
    CHECK(r.bit_pos() == 6);
  }

  TEST_CASE("all-zero block after DC 5 resets the predictor chain") {
    CoeffBlock cb{};
    BitWriter w;
    int next = entropy_encode_block(cb, 5, ChannelClass::luma, w);
    CHECK(next == 0);  // the block's own DC
    auto bytes = w.finish();
    BitReader r(bytes.data(), bytes.size());
    int dec_next = -1;
    CoeffBlock dec = entropy_decode_block(r, 5, ChannelClass::luma, &dec_next);
    CHECK(dec == cb);
    CHECK(dec_next == 0);
  }

  TEST_CASE("round trip is exact over 100000 random clamped blocks") {
    std::mt19937_64 rng(1234);
    const int kBlocks = 100000;
    std::vector<CoeffBlock> blocks;
    blocks.reserve(kBlocks);
    BitWriter w;
    int dc_pred = 0;
    for (int i = 0; i < kBlocks; ++i) {
      // mix sparse (JPEG-like) and dense blocks
      CoeffBlock cb = random_coeffs(rng, i % 3 == 0 ? 90 : 15);
      blocks.push_back(cb);
      dc_pred = entropy_encode_block(cb, dc_pred, ChannelClass::luma, w);
    }
    auto bytes = w.finish();
    BitReader r(bytes.data(), bytes.size());
    dc_pred = 0;
    for (int i = 0; i < kBlocks; ++i) {
      CoeffBlock dec = entropy_decode_block(r, dc_pred, ChannelClass::luma, &dc_pred);
      if (!(dec == blocks[i])) {
        CAPTURE(i);
        REQUIRE(dec == blocks[i]);
      }
    }
  }

  TEST_CASE("chroma table round trip with extreme DC swings") {
    // DC at the clamp bounds produces the widest differentials the format
    // must represent (category 11)
    std::vector<int> dcs = {kCoeffClamp, -kCoeffClamp, kCoeffClamp, 0, -kCoeffClamp};
    BitWriter w;
    int dc_pred = 0;
    for (int dc : dcs) {
      CoeffBlock cb{};
      cb.coeffs[0] = static_cast<std::int16_t>(dc);
      dc_pred = entropy_encode_block(cb, dc_pred, ChannelClass::chroma, w);
    }
    auto bytes = w.finish();
    BitReader r(bytes.data(), bytes.size());
    dc_pred = 0;
    for (int dc : dcs) {
      CoeffBlock dec = entropy_decode_block(r, dc_pred, ChannelClass::chroma, &dc_pred);
      CHECK(dec.coeffs[0] == dc);
    }
  }

  TEST_CASE("long zero runs exercise ZRL") {
    CoeffBlock cb{};
    cb.coeffs[0] = 7;
    // one lone coefficient at the very end of the scan: 62 zeros between
    cb.coeffs[kUnzigzag[63]] = -3;
    BitWriter w;
    entropy_encode_block(cb, 0, ChannelClass::luma, w);
    auto bytes = w.finish();
    BitReader r(bytes.data(), bytes.size());
    int next = 0;
    CoeffBlock dec = entropy_decode_block(r, 0, ChannelClass::luma, &next);
    CHECK(dec == cb);
    CHECK(next == 7);
  }

  TEST_CASE("truncated stream raises a format error naming the bit offset") {
    std::mt19937_64 rng(5);
    CoeffBlock cb = random_coeffs(rng, 80);  // dense block
    BitWriter w;
    entropy_encode_block(cb, 0, ChannelClass::luma, w);
    auto bytes = w.finish();
    REQUIRE(bytes.size() > 2);
    try {
      BitReader r(bytes.data(), bytes.size() / 2);
      int next = 0;
      entropy_decode_block(r, 0, ChannelClass::luma, &next);
      FAIL("expected a format error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::format);
      CHECK(std::string(e.what()).find("bit") != std::string::npos);
    }
  }

  TEST_CASE("corrupting a valid stream is detected or decodes to different data") {
    std::mt19937_64 rng(6);
    CoeffBlock cb = random_coeffs(rng, 50);
    BitWriter w;
    entropy_encode_block(cb, 0, ChannelClass::luma, w);
    auto bytes = w.finish();
    bytes[0] ^= 0x80;  // flip the first bit
    int next = 0;
    try {
      BitReader r(bytes.data(), bytes.size());
      CoeffBlock dec = entropy_decode_block(r, 0, ChannelClass::luma, &next);
      CHECK_FALSE(dec == cb);  // wrong DC category at minimum
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::format);
    }
  }

  TEST_CASE("full scan round trip on 1000 random blocks in channel order") {
    std::mt19937_64 rng(9);
    std::vector<CoeffBlock> blocks;
    BitWriter w;
    int preds[3] = {0, 0, 0};
    for (int i = 0; i < 1000; ++i) {
      int ch = i % 3;
      ChannelClass cls = ch == 0 ? ChannelClass::luma : ChannelClass::chroma;
      CoeffBlock cb = random_coeffs(rng, 25);
      blocks.push_back(cb);
      preds[ch] = entropy_encode_block(cb, preds[ch], cls, w);
    }
    auto bytes = w.finish();
    BitReader r(bytes.data(), bytes.size());
    preds[0] = preds[1] = preds[2] = 0;
    for (int i = 0; i < 1000; ++i) {
      int ch = i % 3;
      ChannelClass cls = ch == 0 ? ChannelClass::luma : ChannelClass::chroma;
      CoeffBlock dec = entropy_decode_block(r, preds[ch], cls, &preds[ch]);
      CHECK(dec == blocks[i]);
    }
  }
}
