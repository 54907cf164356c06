#include "core/image.hpp"

#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>

namespace bcn {

const char* colorspace_name(Colorspace cs) {
  switch (cs) {
    case Colorspace::rgb: return "rgb";
    case Colorspace::ycbcr: return "ycbcr";
    case Colorspace::lab: return "lab";
  }
  return "?";
}

RasterImage::RasterImage(int w, int h, Colorspace cs) : width(w), height(h), colorspace(cs) {
  if (w < 1 || h < 1) fail(ErrorKind::argument, "image dimensions must be positive");
  for (auto& p : planes) p.assign(static_cast<std::size_t>(w) * h, 0.0f);
}

ByteImage::ByteImage(int w, int h, Colorspace cs) : width(w), height(h), colorspace(cs) {
  if (w < 1 || h < 1) fail(ErrorKind::argument, "image dimensions must be positive");
  for (auto& p : planes) p.assign(static_cast<std::size_t>(w) * h, 0);
}

Block8 Context24::center() const {
  Block8 b;
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < 8; ++y)
      for (int x = 0; x < 8; ++x) b.at(c, x, y) = at(c, x + 8, y + 8);
  return b;
}

// ---------------------------------------------------------------- PPM

namespace {

struct PpmCursor {
  const std::uint8_t* data;
  std::size_t size;
  std::size_t pos = 0;

  [[noreturn]] void error(const std::string& msg) const {
    fail(ErrorKind::parse, "ppm: " + msg + " at offset " + std::to_string(pos));
  }

  void skip_space_and_comments() {
    while (pos < size) {
      std::uint8_t c = data[pos];
      if (c == '#') {
        while (pos < size && data[pos] != '\n') ++pos;
      } else if (std::isspace(c)) {
        ++pos;
      } else {
        break;
      }
    }
  }

  int read_uint() {
    skip_space_and_comments();
    if (pos >= size || !std::isdigit(data[pos])) error("expected integer");
    long v = 0;
    while (pos < size && std::isdigit(data[pos])) {
      v = v * 10 + (data[pos] - '0');
      if (v > 1'000'000'000L) error("integer out of range");
      ++pos;
    }
    return static_cast<int>(v);
  }
};

}  // namespace

RasterImage load_ppm(const std::uint8_t* data, std::size_t size) {
  PpmCursor cur{data, size};
  if (size < 2 || data[0] != 'P' || data[1] != '6') {
    fail(ErrorKind::parse, "ppm: bad magic (want P6) at offset 0");
  }
  cur.pos = 2;
  int width = cur.read_uint();
  int height = cur.read_uint();
  int maxval = cur.read_uint();
  if (width < 1 || height < 1) cur.error("non-positive dimensions");
  if (maxval != 255) cur.error("unsupported maxval " + std::to_string(maxval) + " (want 255)");
  if (cur.pos >= size || !std::isspace(data[cur.pos])) cur.error("expected whitespace before payload");
  ++cur.pos;

  std::size_t need = static_cast<std::size_t>(width) * height * 3;
  if (size - cur.pos < need) {
    fail(ErrorKind::parse, "ppm: truncated payload at offset " + std::to_string(size) +
                               " (need " + std::to_string(cur.pos + need) + " bytes)");
  }

  RasterImage img(width, height, Colorspace::rgb);
  const std::uint8_t* px = data + cur.pos;
  std::size_t n = static_cast<std::size_t>(width) * height;
  for (std::size_t i = 0; i < n; ++i) {
    img.planes[0][i] = px[3 * i + 0] / 255.0f;
    img.planes[1][i] = px[3 * i + 1] / 255.0f;
    img.planes[2][i] = px[3 * i + 2] / 255.0f;
  }
  return img;
}

RasterImage load_ppm(const std::vector<std::uint8_t>& bytes) { return load_ppm(bytes.data(), bytes.size()); }

RasterImage load_ppm_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorKind::io, "cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return load_ppm(bytes);
}

std::vector<std::uint8_t> save_ppm(const RasterImage& img) {
  if (img.colorspace != Colorspace::rgb) {
    fail(ErrorKind::argument, "save_ppm requires an RGB image, got " +
                                  std::string(colorspace_name(img.colorspace)));
  }
  std::string header = "P6\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  std::size_t n = static_cast<std::size_t>(img.width) * img.height;
  out.reserve(out.size() + n * 3);
  for (std::size_t i = 0; i < n; ++i) {
    for (int c = 0; c < 3; ++c) {
      int v = round_half_away(static_cast<double>(img.planes[c][i]) * 255.0);
      out.push_back(clamp_byte(v));
    }
  }
  return out;
}

void save_ppm_file(const RasterImage& img, const std::string& path) {
  auto bytes = save_ppm(img);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) fail(ErrorKind::io, "cannot open " + path + " for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) fail(ErrorKind::io, "short write to " + path);
}

// ---------------------------------------------------------------- colorspace

namespace {

// Full-range JFIF matrices.
inline void rgb_to_ycbcr(double r, double g, double b, double& y, double& cb, double& cr) {
  y = 0.299 * r + 0.587 * g + 0.114 * b;
  cb = -0.168735892 * r - 0.331264108 * g + 0.5 * b + 0.5;
  cr = 0.5 * r - 0.418687589 * g - 0.081312411 * b + 0.5;
}

inline void ycbcr_to_rgb(double y, double cb, double cr, double& r, double& g, double& b) {
  cb -= 0.5;
  cr -= 0.5;
  r = y + 1.402 * cr;
  g = y - 0.344136286 * cb - 0.714136286 * cr;
  b = y + 1.772 * cb;
}

inline double srgb_to_linear(double c) {
  return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

inline double linear_to_srgb(double c) {
  return c <= 0.0031308 ? c * 12.92 : 1.055 * std::pow(c, 1.0 / 2.4) - 0.055;
}

constexpr double kXn = 0.95047, kYn = 1.0, kZn = 1.08883;  // D65
constexpr double kLabDelta = 6.0 / 29.0;

inline double lab_f(double t) {
  return t > kLabDelta * kLabDelta * kLabDelta ? std::cbrt(t)
                                               : t / (3.0 * kLabDelta * kLabDelta) + 4.0 / 29.0;
}

inline double lab_f_inv(double ft) {
  return ft > kLabDelta ? ft * ft * ft : 3.0 * kLabDelta * kLabDelta * (ft - 4.0 / 29.0);
}

// Scaled Lab: plane0 = L/100, planes 1-2 = a/128, b/128.
inline void rgb_to_lab(double r, double g, double b, double& sl, double& sa, double& sb) {
  double rl = srgb_to_linear(r), gl = srgb_to_linear(g), bl = srgb_to_linear(b);
  double x = 0.4124564 * rl + 0.3575761 * gl + 0.1804375 * bl;
  double y = 0.2126729 * rl + 0.7151522 * gl + 0.0721750 * bl;
  double z = 0.0193339 * rl + 0.1191920 * gl + 0.9503041 * bl;
  double fx = lab_f(x / kXn), fy = lab_f(y / kYn), fz = lab_f(z / kZn);
  sl = (116.0 * fy - 16.0) / 100.0;
  sa = 500.0 * (fx - fy) / 128.0;
  sb = 200.0 * (fy - fz) / 128.0;
}

inline void lab_to_rgb(double sl, double sa, double sb, double& r, double& g, double& b) {
  double L = sl * 100.0, a = sa * 128.0, bb = sb * 128.0;
  double fy = (L + 16.0) / 116.0;
  double fx = fy + a / 500.0;
  double fz = fy - bb / 200.0;
  double x = kXn * lab_f_inv(fx), y = kYn * lab_f_inv(fy), z = kZn * lab_f_inv(fz);
  double rl = 3.2404542 * x - 1.5371385 * y - 0.4985314 * z;
  double gl = -0.9692660 * x + 1.8760108 * y + 0.0415560 * z;
  double bl = 0.0556434 * x - 0.2040259 * y + 1.0572252 * z;
  r = linear_to_srgb(clamp(rl, 0.0, 1.0));
  g = linear_to_srgb(clamp(gl, 0.0, 1.0));
  b = linear_to_srgb(clamp(bl, 0.0, 1.0));
}

}  // namespace

RasterImage convert_colorspace(const RasterImage& img, Colorspace target) {
  if (img.colorspace == target) return img;
  // Everything routes through RGB.
  if (img.colorspace != Colorspace::rgb) {
    RasterImage rgb(img.width, img.height, Colorspace::rgb);
    std::size_t n = static_cast<std::size_t>(img.width) * img.height;
    for (std::size_t i = 0; i < n; ++i) {
      double a = img.planes[0][i], b = img.planes[1][i], c = img.planes[2][i];
      double r, g, bl;
      if (img.colorspace == Colorspace::ycbcr) {
        ycbcr_to_rgb(a, b, c, r, g, bl);
      } else {
        lab_to_rgb(a, b, c, r, g, bl);
      }
      rgb.planes[0][i] = static_cast<float>(clamp(r, 0.0, 1.0));
      rgb.planes[1][i] = static_cast<float>(clamp(g, 0.0, 1.0));
      rgb.planes[2][i] = static_cast<float>(clamp(bl, 0.0, 1.0));
    }
    return convert_colorspace(rgb, target);
  }
  RasterImage out(img.width, img.height, target);
  std::size_t n = static_cast<std::size_t>(img.width) * img.height;
  for (std::size_t i = 0; i < n; ++i) {
    double r = img.planes[0][i], g = img.planes[1][i], b = img.planes[2][i];
    double p0, p1, p2;
    if (target == Colorspace::ycbcr) {
      rgb_to_ycbcr(r, g, b, p0, p1, p2);
      p0 = clamp(p0, 0.0, 1.0);
      p1 = clamp(p1, 0.0, 1.0);
      p2 = clamp(p2, 0.0, 1.0);
    } else {
      rgb_to_lab(r, g, b, p0, p1, p2);
      p0 = clamp(p0, 0.0, 1.0);
      p1 = clamp(p1, -1.0, 1.0);
      p2 = clamp(p2, -1.0, 1.0);
    }
    out.planes[0][i] = static_cast<float>(p0);
    out.planes[1][i] = static_cast<float>(p1);
    out.planes[2][i] = static_cast<float>(p2);
  }
  return out;
}

// ---------------------------------------------------------------- byte interchange

namespace {

// Lab chroma planes are signed, map [-1,1] onto [0,255]; everything else is [0,1].
inline bool plane_is_signed(Colorspace cs, int plane) { return cs == Colorspace::lab && plane > 0; }

}  // namespace

ByteImage quantize_image(const RasterImage& img) {
  ByteImage out(img.width, img.height, img.colorspace);
  std::size_t n = static_cast<std::size_t>(img.width) * img.height;
  for (int c = 0; c < 3; ++c) {
    bool snd = plane_is_signed(img.colorspace, c);
    for (std::size_t i = 0; i < n; ++i) {
      double v = img.planes[c][i];
      double scaled = snd ? (v + 1.0) * 127.5 : v * 255.0;
      out.planes[c][i] = clamp_byte(round_half_away(scaled));
    }
  }
  return out;
}

RasterImage dequantize_image(const ByteImage& img) {
  RasterImage out(img.width, img.height, img.colorspace);
  std::size_t n = static_cast<std::size_t>(img.width) * img.height;
  for (int c = 0; c < 3; ++c) {
    bool snd = plane_is_signed(img.colorspace, c);
    for (std::size_t i = 0; i < n; ++i) {
      double b = img.planes[c][i];
      out.planes[c][i] = static_cast<float>(snd ? b / 127.5 - 1.0 : b / 255.0);
    }
  }
  return out;
}

// ---------------------------------------------------------------- block plumbing

namespace {

template <typename Img>
Img pad_impl(const Img& img) {
  int pw = (img.width + 7) / 8 * 8;
  int ph = (img.height + 7) / 8 * 8;
  if (pw == img.width && ph == img.height) return img;
  Img out(pw, ph, img.colorspace);
  for (int c = 0; c < 3; ++c) {
    for (int y = 0; y < ph; ++y) {
      int sy = y < img.height ? y : img.height - 1;
      for (int x = 0; x < pw; ++x) {
        int sx = x < img.width ? x : img.width - 1;
        out.at(c, x, y) = img.at(c, sx, sy);
      }
    }
  }
  return out;
}

}  // namespace

ByteImage pad_to_block_multiple(const ByteImage& img) { return pad_impl(img); }
RasterImage pad_to_block_multiple(const RasterImage& img) { return pad_impl(img); }

Context24 extract_context(const ByteImage& img, int bx, int by) {
  if (bx < 0 || by < 0 || bx >= img.blocks_x() || by >= img.blocks_y()) {
    fail(ErrorKind::argument, "block (" + std::to_string(bx) + "," + std::to_string(by) +
                                  ") outside grid " + std::to_string(img.blocks_x()) + "x" +
                                  std::to_string(img.blocks_y()));
  }
  Context24 ctx;
  ctx.bx = bx;
  ctx.by = by;
  int ox = bx * 8 - 8;
  int oy = by * 8 - 8;
  for (int c = 0; c < 3; ++c) {
    for (int y = 0; y < 24; ++y) {
      int sy = clamp(oy + y, 0, img.height - 1);
      for (int x = 0; x < 24; ++x) {
        int sx = clamp(ox + x, 0, img.width - 1);
        ctx.at(c, x, y) = img.at(c, sx, sy);
      }
    }
  }
  return ctx;
}

Block8 extract_block(const ByteImage& img, int bx, int by) {
  if (bx < 0 || by < 0 || bx >= img.blocks_x() || by >= img.blocks_y()) {
    fail(ErrorKind::argument, "block (" + std::to_string(bx) + "," + std::to_string(by) + ") out of range");
  }
  Block8 b;
  for (int c = 0; c < 3; ++c) {
    for (int y = 0; y < 8; ++y) {
      int sy = clamp(by * 8 + y, 0, img.height - 1);
      for (int x = 0; x < 8; ++x) {
        int sx = clamp(bx * 8 + x, 0, img.width - 1);
        b.at(c, x, y) = img.at(c, sx, sy);
      }
    }
  }
  return b;
}

ByteImage assemble_blocks(const std::vector<Block8>& blocks, int blocks_x, int blocks_y,
                          int width, int height, Colorspace cs) {
  if (blocks_x != (width + 7) / 8 || blocks_y != (height + 7) / 8) {
    fail(ErrorKind::argument, "block grid " + std::to_string(blocks_x) + "x" + std::to_string(blocks_y) +
                                  " does not cover " + std::to_string(width) + "x" + std::to_string(height));
  }
  if (blocks.size() != static_cast<std::size_t>(blocks_x) * blocks_y) {
    fail(ErrorKind::argument, "block count mismatch");
  }
  ByteImage out(width, height, cs);
  for (int by = 0; by < blocks_y; ++by) {
    for (int bx = 0; bx < blocks_x; ++bx) {
      const Block8& b = blocks[static_cast<std::size_t>(by) * blocks_x + bx];
      int x0 = bx * 8, y0 = by * 8;
      for (int c = 0; c < 3; ++c) {
        for (int y = 0; y < 8 && y0 + y < height; ++y) {
          for (int x = 0; x < 8 && x0 + x < width; ++x) {
            out.at(c, x0 + x, y0 + y) = b.at(c, x, y);
          }
        }
      }
    }
  }
  return out;
}

}  // namespace bcn
