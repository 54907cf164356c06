#include <random>

#include "core/baseline_jpeg.hpp"
#include "core/checkpoint.hpp"
#include "core/codec.hpp"
#include "core/container.hpp"
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

Model make_model(Variant v, std::uint64_t seed = 1, bool zero_head = false, int ch = 8,
                 int res = 1) {
  ModelConfig cfg;
  cfg.variant = v;
  cfg.channels = ch;
  cfg.n_res_blocks = res;
  cfg.seed = seed;
  Network net(cfg);
  if (zero_head) {
    for (const auto& r : net.named_tensors()) {
      if (r.name == "head.weight" || r.name == "head.bias") {
        for (float& val : r.tensor->data) val = 0.0f;
      }
    }
  }
  auto bytes = save_checkpoint(net);
  return Model{load_checkpoint(bytes), checkpoint_id(bytes)};
}

ByteImage to_coded_bytes(const RasterImage& rgb, Colorspace cs) {
  return quantize_image(convert_colorspace(rgb, cs));
}

}  // namespace

TEST_SUITE("container") {
  TEST_CASE("serialize/parse round trip over all field combinations") {
    for (bool on : {false, true}) {
      for (Colorspace cs : {Colorspace::ycbcr, Colorspace::lab}) {
        ContainerHeader h;
        h.predictor_on = on;
        h.colorspace = cs;
        h.width = 12345;
        h.height = 67;
        h.quality = 83;
        h.model_id = on ? 0xDEADBEEFCAFEF00Dull : 0;
        auto bytes = serialize_header(h);
        REQUIRE(bytes.size() == kContainerHeaderSize);
        ContainerHeader back = parse_header(bytes.data(), bytes.size());
        CHECK(back.predictor_on == on);
        CHECK(back.colorspace == cs);
        CHECK(back.width == 12345u);
        CHECK(back.height == 67u);
        CHECK(back.quality == 83);
        CHECK(back.model_id == h.model_id);
      }
    }
  }

  TEST_CASE("exact byte layout") {
    ContainerHeader h;
    h.predictor_on = true;
    h.colorspace = Colorspace::lab;
    h.width = 0x01020304;
    h.height = 0x0A0B0C0D;
    h.quality = 20;
    h.model_id = 0x1122334455667788ull;
    auto b = serialize_header(h);
    REQUIRE(b.size() == 23);
    CHECK(b[0] == 'B');
    CHECK(b[1] == 'C');
    CHECK(b[2] == 'N');
    CHECK(b[3] == '1');
    CHECK(b[4] == 1);                      // version
    CHECK(b[5] == 0x03);                   // predictor on | lab << 1
    CHECK(b[6] == 0x04);                   // width, little-endian
    CHECK(b[7] == 0x03);
    CHECK(b[8] == 0x02);
    CHECK(b[9] == 0x01);
    CHECK(b[10] == 0x0D);                  // height, little-endian
    CHECK(b[13] == 0x0A);
    CHECK(b[14] == 20);                    // quality
    CHECK(b[15] == 0x88);                  // model id, little-endian
    CHECK(b[22] == 0x11);
  }

  TEST_CASE("serialize validates its input") {
    ContainerHeader good;
    good.width = 8;
    good.height = 8;
    good.quality = 50;
    CHECK(serialize_header(good).size() == kContainerHeaderSize);

    ContainerHeader h = good;
    h.quality = 0;
    CHECK(kind_of([&] { serialize_header(h); }) == ErrorKind::argument);
    h = good;
    h.quality = 101;
    CHECK(kind_of([&] { serialize_header(h); }) == ErrorKind::argument);
    h = good;
    h.width = 0;
    CHECK(kind_of([&] { serialize_header(h); }) == ErrorKind::argument);
    h = good;
    h.model_id = 5;  // predictor off but nonzero id
    CHECK(kind_of([&] { serialize_header(h); }) == ErrorKind::argument);
    h = good;
    h.predictor_on = true;  // predictor on but zero id
    CHECK(kind_of([&] { serialize_header(h); }) == ErrorKind::argument);
    h = good;
    h.colorspace = Colorspace::rgb;
    CHECK(kind_of([&] { serialize_header(h); }) == ErrorKind::argument);
  }

  TEST_CASE("parse rejects malformed headers with format errors") {
    ContainerHeader h;
    h.width = 100;
    h.height = 50;
    h.quality = 20;
    auto good = serialize_header(h);

    CHECK(kind_of([&] { parse_header(good.data(), 10); }) == ErrorKind::format);

    auto bad = good;
    bad[0] = 'X';
    CHECK(kind_of([&] { parse_header(bad.data(), bad.size()); }) == ErrorKind::format);

    bad = good;
    bad[4] = 2;  // version
    CHECK(kind_of([&] { parse_header(bad.data(), bad.size()); }) == ErrorKind::format);

    bad = good;
    bad[5] = 0x08;  // unknown flag bit
    CHECK(kind_of([&] { parse_header(bad.data(), bad.size()); }) == ErrorKind::format);

    bad = good;
    bad[5] = 0x04;  // colorspace code 2
    CHECK(kind_of([&] { parse_header(bad.data(), bad.size()); }) == ErrorKind::format);

    bad = good;
    bad[14] = 0;  // quality
    CHECK(kind_of([&] { parse_header(bad.data(), bad.size()); }) == ErrorKind::format);

    bad = good;
    bad[15] = 1;  // nonzero model id with predictor off
    CHECK(kind_of([&] { parse_header(bad.data(), bad.size()); }) == ErrorKind::format);
  }
}

TEST_SUITE("codec") {
  TEST_CASE("recon buffer enforces write-before-read in its grid") {
    ReconBuffer rb(3, 2);
    CHECK(rb.blocks_x() == 3);
    CHECK(rb.blocks_y() == 2);
    CHECK(rb.in_range(2, 1));
    CHECK_FALSE(rb.in_range(3, 0));
    CHECK_FALSE(rb.written(0, 0));

    Block8 b;
    b.samples.fill(9);
    rb.put(1, 0, b);
    CHECK(rb.written(1, 0));
    CHECK(rb.get(1, 0) == b);
    CHECK(kind_of([&] { rb.get(0, 0); }) == ErrorKind::internal);  // sequencing bug
    CHECK(kind_of([&] { rb.get(5, 0); }) == ErrorKind::argument);
    CHECK(kind_of([&] { rb.put(0, 7, b); }) == ErrorKind::argument);
    CHECK(kind_of([] { ReconBuffer bad(0, 1); }) == ErrorKind::argument);
  }

  TEST_CASE("predict_block: off is constant 128, zero-head model too") {
    ReconBuffer rb(2, 2);
    Block8 filler;
    filler.samples.fill(31);
    rb.put(0, 0, filler);
    Block8 off = predict_block(rb, 0, 0, nullptr);
    for (auto v : off.samples) CHECK(v == 128);

    Model zero = make_model(Variant::pred, 2, /*zero_head=*/true);
    Block8 zh = predict_block(rb, 0, 0, &zero.net);
    for (auto v : zh.samples) CHECK(v == 128);
    CHECK(kind_of([&] { predict_block(rb, 4, 0, nullptr); }) == ErrorKind::argument);
  }

  TEST_CASE("predictor off reduces to baseline JPEG on 10 images x 4 qualities") {
    for (std::uint64_t seed = 100; seed < 110; ++seed) {
      int w = 40 + static_cast<int>(seed % 3) * 9;  // include non-multiples of 8
      int h = 32 + static_cast<int>(seed % 2) * 5;
      RasterImage rgb = synth::make_image(seed, w, h);
      ByteImage coded = to_coded_bytes(rgb, Colorspace::ycbcr);
      ByteImage padded = pad_to_block_multiple(coded);
      for (int q : {10, 20, 50, 80}) {
        auto bytes = encode_image(rgb, q, Colorspace::ycbcr, nullptr);
        // scan bytes are identical to the standalone baseline scan
        auto scan = baseline_encode_scan(padded, q);
        REQUIRE(bytes.size() == kContainerHeaderSize + scan.size());
        CHECK(std::equal(scan.begin(), scan.end(), bytes.begin() + kContainerHeaderSize));
        // decoded pixels are identical to the baseline round trip
        RasterImage dec = decode_image(bytes, nullptr);
        CHECK(dec.width == w);
        CHECK(dec.height == h);
        ByteImage dec_bytes = to_coded_bytes(dec, Colorspace::ycbcr);
        ByteImage ref = baseline_roundtrip(coded, q);
        ByteImage ref_rgb_bytes =
            to_coded_bytes(convert_colorspace(dequantize_image(ref), Colorspace::rgb),
                           Colorspace::ycbcr);
        CHECK(dec_bytes.planes == ref_rgb_bytes.planes);
      }
    }
  }

  TEST_CASE("predictor off reduces to baseline in Lab as well") {
    for (std::uint64_t seed = 120; seed < 123; ++seed) {
      RasterImage rgb = synth::make_image(seed, 33, 25);
      ByteImage padded = pad_to_block_multiple(to_coded_bytes(rgb, Colorspace::lab));
      auto bytes = encode_image(rgb, 35, Colorspace::lab, nullptr);
      auto scan = baseline_encode_scan(padded, 35);
      REQUIRE(bytes.size() == kContainerHeaderSize + scan.size());
      CHECK(std::equal(scan.begin(), scan.end(), bytes.begin() + kContainerHeaderSize));
      ContainerHeader h = parse_header(bytes.data(), bytes.size());
      CHECK(h.colorspace == Colorspace::lab);
      CHECK_FALSE(h.predictor_on);
    }
  }

  TEST_CASE("encode and decode are bitwise deterministic") {
    RasterImage rgb = synth::make_image(130, 56, 40);
    Model m = make_model(Variant::pred, 3);
    auto b1 = encode_image(rgb, 20, Colorspace::ycbcr, &m);
    auto b2 = encode_image(rgb, 20, Colorspace::ycbcr, &m);
    CHECK(b1 == b2);
    RasterImage d1 = decode_image(b1, &m);
    RasterImage d2 = decode_image(b1, &m);
    for (int p = 0; p < 3; ++p) CHECK(d1.planes[p] == d2.planes[p]);
  }

  TEST_CASE("zero-head predictor emits exactly the baseline scan") {
    RasterImage rgb = synth::make_image(131, 48, 32);
    Model zero = make_model(Variant::pred, 4, /*zero_head=*/true);
    auto on = encode_image(rgb, 20, Colorspace::ycbcr, &zero);
    auto off = encode_image(rgb, 20, Colorspace::ycbcr, nullptr);
    ContainerHeader h_on = parse_header(on.data(), on.size());
    ContainerHeader h_off = parse_header(off.data(), off.size());
    CHECK(h_on.predictor_on);
    CHECK(h_on.model_id == zero.id);
    CHECK_FALSE(h_off.predictor_on);
    // identical scans: a constant-128 prediction equals predictor-off
    REQUIRE(on.size() == off.size());
    CHECK(std::equal(on.begin() + kContainerHeaderSize, on.end(),
                     off.begin() + kContainerHeaderSize));
  }

  TEST_CASE("encoder and decoder reconstruct in lockstep") {
    RasterImage rgb = synth::make_image(132, 64, 48);
    Model m = make_model(Variant::pred, 5, false, 8, 2);
    struct Seen {
      std::vector<std::tuple<int, int, Block8>> blocks;
    } enc, dec;
    CodecHooks eh;
    eh.on_block = [&](int bx, int by, const Block8& b) { enc.blocks.emplace_back(bx, by, b); };
    CodecHooks dh;
    dh.on_block = [&](int bx, int by, const Block8& b) { dec.blocks.emplace_back(bx, by, b); };
    auto bytes = encode_image(rgb, 20, Colorspace::ycbcr, &m, &eh);
    decode_image(bytes, &m, &dh);
    REQUIRE(enc.blocks.size() == static_cast<std::size_t>(8 * 6));
    REQUIRE(enc.blocks.size() == dec.blocks.size());
    // raster order and byte-identical reconstructions at every step
    std::size_t i = 0;
    for (int by = 0; by < 6; ++by) {
      for (int bx = 0; bx < 8; ++bx, ++i) {
        CHECK(std::get<0>(enc.blocks[i]) == bx);
        CHECK(std::get<1>(enc.blocks[i]) == by);
        CHECK(enc.blocks[i] == dec.blocks[i]);
      }
    }
  }

  TEST_CASE("prediction errors do not accumulate across the image") {
    // an untrained predictor is wrong everywhere, but residual coding must
    // keep late blocks as accurate as early ones
    RasterImage rgb = synth::make_image(133, 64, 64);
    Model m = make_model(Variant::pred, 6);
    ByteImage orig = to_coded_bytes(rgb, Colorspace::ycbcr);
    auto bytes = encode_image(rgb, 50, Colorspace::ycbcr, &m);
    ByteImage dec = to_coded_bytes(decode_image(bytes, &m), Colorspace::ycbcr);
    auto row_mse = [&](int y0, int y1) {
      double acc = 0.0;
      long long n = 0;
      for (int y = y0; y < y1; ++y)
        for (int x = 0; x < 64; ++x) {
          double d = static_cast<double>(orig.at(0, x, y)) - dec.at(0, x, y);
          acc += d * d;
          ++n;
        }
      return acc / static_cast<double>(n);
    };
    double first = row_mse(0, 16), last = row_mse(48, 64);
    CHECK(last < 8.0 * (first + 1.0));
  }

  TEST_CASE("model identity is enforced end to end") {
    RasterImage rgb = synth::make_image(134, 40, 32);
    Model m = make_model(Variant::pred, 7);
    Model other = make_model(Variant::pred, 8);
    Model ar = make_model(Variant::ar, 9);

    CHECK(kind_of([&] { encode_image(rgb, 20, Colorspace::ycbcr, &ar); }) == ErrorKind::model);

    auto bytes = encode_image(rgb, 20, Colorspace::ycbcr, &m);
    CHECK(kind_of([&] { decode_image(bytes, nullptr); }) == ErrorKind::model);
    CHECK(kind_of([&] { decode_image(bytes, &other); }) == ErrorKind::model);
    CHECK(kind_of([&] { decode_image(bytes, &ar); }) == ErrorKind::model);
    try {
      decode_image(bytes, &other);
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("model id") != std::string::npos);
    }

    // tampering with the stored id is detected the same way
    auto tampered = bytes;
    tampered[15] ^= 0xFF;
    CHECK(kind_of([&] { decode_image(tampered, &m); }) == ErrorKind::model);

    // decoding a predictor-off stream ignores any supplied model
    auto off = encode_image(rgb, 20, Colorspace::ycbcr, nullptr);
    RasterImage with = decode_image(off, &m);
    RasterImage without = decode_image(off, nullptr);
    for (int p = 0; p < 3; ++p) CHECK(with.planes[p] == without.planes[p]);
  }

  TEST_CASE("predictive round trip error stays at baseline scale") {
    RasterImage rgb = synth::make_image(135, 48, 40);
    Model m = make_model(Variant::pred, 10);
    ByteImage orig = to_coded_bytes(rgb, Colorspace::ycbcr);
    auto on = encode_image(rgb, 50, Colorspace::ycbcr, &m);
    auto off = encode_image(rgb, 50, Colorspace::ycbcr, nullptr);
    auto sse = [&](const RasterImage& dec) {
      ByteImage d = to_coded_bytes(dec, Colorspace::ycbcr);
      long long acc = 0;
      for (int c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < d.planes[c].size(); ++i) {
          long long diff = static_cast<long long>(d.planes[c][i]) - orig.planes[c][i];
          acc += diff * diff;
        }
      return acc;
    };
    long long e_on = sse(decode_image(on, &m));
    long long e_off = sse(decode_image(off, nullptr));
    // both reconstructions carry only per-block quantization error
    CHECK(e_on < 3 * e_off + 1000);
  }

  TEST_CASE("malformed streams raise format errors") {
    RasterImage rgb = synth::make_image(136, 32, 24);
    auto bytes = encode_image(rgb, 20, Colorspace::ycbcr, nullptr);

    auto truncated = std::vector<std::uint8_t>(bytes.begin(), bytes.begin() + bytes.size() / 2);
    CHECK(kind_of([&] { decode_image(truncated, nullptr); }) == ErrorKind::format);

    auto header_only = std::vector<std::uint8_t>(bytes.begin(), bytes.begin() + 10);
    CHECK(kind_of([&] { decode_image(header_only, nullptr); }) == ErrorKind::format);

    auto trailing = bytes;
    trailing.push_back(0xFF);
    CHECK(kind_of([&] { decode_image(trailing, nullptr); }) == ErrorKind::format);

    auto bad_magic = bytes;
    bad_magic[2] = 'X';
    CHECK(kind_of([&] { decode_image(bad_magic, nullptr); }) == ErrorKind::format);
  }

  TEST_CASE("aggregate rate is monotone in quality") {
    std::array<std::size_t, 4> totals{};
    const int qualities[4] = {10, 30, 60, 90};
    for (std::uint64_t seed = 140; seed < 146; ++seed) {
      RasterImage rgb = synth::make_image(seed, 64, 48);
      for (int i = 0; i < 4; ++i) {
        totals[i] += encode_image(rgb, qualities[i], Colorspace::ycbcr, nullptr).size();
      }
    }
    CHECK(totals[0] < totals[1]);
    CHECK(totals[1] < totals[2]);
    CHECK(totals[2] < totals[3]);
  }

  TEST_CASE("argument validation") {
    RasterImage rgb = synth::make_image(150, 16, 16);
    CHECK(kind_of([&] { encode_image(rgb, 0, Colorspace::ycbcr, nullptr); }) ==
          ErrorKind::argument);
    CHECK(kind_of([&] { encode_image(rgb, 101, Colorspace::ycbcr, nullptr); }) ==
          ErrorKind::argument);
    CHECK(kind_of([&] { encode_image(rgb, 50, Colorspace::rgb, nullptr); }) ==
          ErrorKind::argument);
  }
}
