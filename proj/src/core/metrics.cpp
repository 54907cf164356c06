#include "core/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>

#include "core/baseline_jpeg.hpp"
#include "core/codec.hpp"
#include "core/enhance.hpp"
#include "core/io.hpp"

namespace bcn {

namespace {

void require_comparable(const ByteImage& a, const ByteImage& b) {
  if (a.width != b.width || a.height != b.height) {
    fail(ErrorKind::argument, "metric inputs have different dimensions");
  }
  if (a.colorspace != b.colorspace) {
    fail(ErrorKind::argument, "metric inputs are in different colorspaces");
  }
}

// Luma plane as doubles; RGB collapses through the JPEG luma weights.
std::vector<double> luma_of(const ByteImage& img) {
  std::vector<double> out(static_cast<std::size_t>(img.width) * img.height);
  if (img.colorspace == Colorspace::rgb) {
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i] = round_half_away(0.299 * img.planes[0][i] + 0.587 * img.planes[1][i] +
                               0.114 * img.planes[2][i]);
    }
  } else {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = img.planes[0][i];
  }
  return out;
}

}  // namespace

double psnr(const ByteImage& a, const ByteImage& b) {
  require_comparable(a, b);
  std::int64_t sum = 0;
  for (int p = 0; p < 3; ++p) {
    for (std::size_t i = 0; i < a.planes[p].size(); ++i) {
      int d = static_cast<int>(a.planes[p][i]) - static_cast<int>(b.planes[p][i]);
      sum += static_cast<std::int64_t>(d) * d;
    }
  }
  if (sum == 0) return 99.0;
  double mse = static_cast<double>(sum) / (3.0 * a.width * a.height);
  return std::min(99.0, 10.0 * std::log10(255.0 * 255.0 / mse));
}

double ssim(const ByteImage& a, const ByteImage& b) {
  require_comparable(a, b);
  constexpr int kWin = 11;
  constexpr double kSigma = 1.5;
  constexpr double kC1 = (0.01 * 255.0) * (0.01 * 255.0);
  constexpr double kC2 = (0.03 * 255.0) * (0.03 * 255.0);
  int w = a.width, h = a.height;
  if (w < kWin || h < kWin) {
    fail(ErrorKind::argument, "ssim needs images of at least 11x11 pixels");
  }

  double kernel[kWin];
  double ksum = 0.0;
  for (int i = 0; i < kWin; ++i) {
    double d = i - (kWin - 1) / 2;
    kernel[i] = std::exp(-d * d / (2.0 * kSigma * kSigma));
    ksum += kernel[i];
  }
  for (double& k : kernel) k /= ksum;

  std::vector<double> la = luma_of(a), lb = luma_of(b);
  // The five filtered moments needed by the SSIM formula.
  std::array<std::vector<double>, 5> src;
  src[0] = la;
  src[1] = lb;
  src[2].resize(la.size());
  src[3].resize(la.size());
  src[4].resize(la.size());
  for (std::size_t i = 0; i < la.size(); ++i) {
    src[2][i] = la[i] * la[i];
    src[3][i] = lb[i] * lb[i];
    src[4][i] = la[i] * lb[i];
  }

  int vw = w - kWin + 1, vh = h - kWin + 1;
  std::array<std::vector<double>, 5> filt;
  for (int m = 0; m < 5; ++m) {
    // horizontal pass (valid columns), then vertical pass (valid rows)
    std::vector<double> tmp(static_cast<std::size_t>(vw) * h);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < vw; ++x) {
        double acc = 0.0;
        for (int k = 0; k < kWin; ++k) acc += kernel[k] * src[m][static_cast<std::size_t>(y) * w + x + k];
        tmp[static_cast<std::size_t>(y) * vw + x] = acc;
      }
    }
    filt[m].resize(static_cast<std::size_t>(vw) * vh);
    for (int y = 0; y < vh; ++y) {
      for (int x = 0; x < vw; ++x) {
        double acc = 0.0;
        for (int k = 0; k < kWin; ++k) acc += kernel[k] * tmp[static_cast<std::size_t>(y + k) * vw + x];
        filt[m][static_cast<std::size_t>(y) * vw + x] = acc;
      }
    }
  }

  double total = 0.0;
  for (std::size_t i = 0; i < filt[0].size(); ++i) {
    double mu_a = filt[0][i], mu_b = filt[1][i];
    double var_a = filt[2][i] - mu_a * mu_a;
    double var_b = filt[3][i] - mu_b * mu_b;
    double cov = filt[4][i] - mu_a * mu_b;
    total += ((2.0 * mu_a * mu_b + kC1) * (2.0 * cov + kC2)) /
             ((mu_a * mu_a + mu_b * mu_b + kC1) * (var_a + var_b + kC2));
  }
  return total / static_cast<double>(filt[0].size());
}

double bits_per_pixel(std::size_t byte_count, int width, int height) {
  if (width < 1 || height < 1) fail(ErrorKind::argument, "bpp needs positive dimensions");
  return static_cast<double>(byte_count) * 8.0 / (static_cast<double>(width) * height);
}

PositionAccum block_position_accumulate(const std::vector<RasterImage>& images, int quality) {
  if (images.empty()) fail(ErrorKind::data, "block statistics need a non-empty corpus");
  PositionAccum acc;
  for (const RasterImage& img : images) {
    ByteImage clean = pad_to_block_multiple(quantize_image(convert_colorspace(img, Colorspace::ycbcr)));
    ByteImage lossy = baseline_roundtrip(clean, quality);
    for (int y = 0; y < clean.height; ++y) {
      for (int x = 0; x < clean.width; ++x) {
        int d = static_cast<int>(clean.at(0, x, y)) - static_cast<int>(lossy.at(0, x, y));
        acc.sum[(y % 8) * 8 + (x % 8)] += static_cast<std::int64_t>(d) * d;
      }
    }
    acc.blocks += static_cast<std::int64_t>(clean.blocks_x()) * clean.blocks_y();
  }
  return acc;
}

std::array<double, 64> block_position_finish(const PositionAccum& acc) {
  if (acc.blocks < 1) fail(ErrorKind::data, "block statistics need at least one block");
  std::array<double, 64> grid{};
  for (int i = 0; i < 64; ++i) grid[i] = static_cast<double>(acc.sum[i]) / static_cast<double>(acc.blocks);
  return grid;
}

std::array<double, 64> block_position_mse(const std::vector<RasterImage>& images, int quality) {
  return block_position_finish(block_position_accumulate(images, quality));
}

std::array<double, 64> block_position_mse_dir(const std::string& corpus_dir, int quality) {
  std::vector<std::string> names = list_ppm_files(corpus_dir);
  if (names.empty()) fail(ErrorKind::data, "corpus has no .ppm images: " + corpus_dir);
  std::vector<RasterImage> images;
  for (const std::string& name : names) {
    images.push_back(load_ppm_file((std::filesystem::path(corpus_dir) / name).string()));
  }
  return block_position_mse(images, quality);
}

std::string grid_to_csv(const std::array<double, 64>& grid) {
  std::string out;
  char buf[64];
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 8; ++x) {
      std::snprintf(buf, sizeof buf, "%.17g", grid[y * 8 + x]);
      out += buf;
      out += (x == 7) ? '\n' : ',';
    }
  }
  return out;
}

std::vector<std::uint8_t> grid_to_pgm(const std::array<double, 64>& grid) {
  double peak = 0.0;
  for (double v : grid) peak = std::max(peak, v);
  std::string header = "P5\n256 256\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(out.size() + 256 * 256);
  for (int y = 0; y < 256; ++y) {
    for (int x = 0; x < 256; ++x) {
      double v = grid[(y / 32) * 8 + (x / 32)];
      out.push_back(peak > 0.0 ? clamp_byte(round_half_away(v / peak * 255.0)) : 0);
    }
  }
  return out;
}

const char* eval_mode_name(EvalMode m) {
  switch (m) {
    case EvalMode::jpeg: return "JPEG";
    case EvalMode::jpeg_ar: return "JPEG+AR";
    case EvalMode::bcnn: return "BCNN";
    case EvalMode::bcnn_ar: return "BCNN+AR";
  }
  fail(ErrorKind::internal, "unreachable eval mode");
}

EvalMode eval_mode_from_name(const std::string& name) {
  std::string low;
  for (char c : name) low += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (low == "jpeg") return EvalMode::jpeg;
  if (low == "jpeg+ar") return EvalMode::jpeg_ar;
  if (low == "bcnn") return EvalMode::bcnn;
  if (low == "bcnn+ar") return EvalMode::bcnn_ar;
  fail(ErrorKind::argument, "unknown mode '" + name + "' (expected jpeg, jpeg+ar, bcnn, bcnn+ar)");
}

std::vector<MetricsRecord> rd_sweep(const std::string& corpus_dir, const std::vector<int>& qualities,
                                    const std::vector<EvalMode>& modes, Model* ar, Model* pred,
                                    Colorspace cs) {
  if (qualities.empty()) fail(ErrorKind::argument, "rd_sweep needs at least one quality");
  for (int q : qualities) {
    if (q < 1 || q > 100) fail(ErrorKind::argument, "quality must be in 1..100");
  }
  if (modes.empty()) fail(ErrorKind::argument, "rd_sweep needs at least one mode");
  bool needs_ar = false, needs_pred = false;
  for (EvalMode m : modes) {
    needs_ar |= (m == EvalMode::jpeg_ar || m == EvalMode::bcnn_ar);
    needs_pred |= (m == EvalMode::bcnn || m == EvalMode::bcnn_ar);
  }
  if (needs_ar && !ar) fail(ErrorKind::argument, "the requested modes need an AR model (--ar)");
  if (needs_pred && !pred) fail(ErrorKind::argument, "the requested modes need a PRED model (--pred)");
  if (ar && ar->net.config().variant != Variant::ar) {
    fail(ErrorKind::model, "--ar model is not an AR checkpoint");
  }
  if (pred && pred->net.config().variant != Variant::pred) {
    fail(ErrorKind::model, "--pred model is not a PRED checkpoint");
  }

  std::vector<std::string> names = list_ppm_files(corpus_dir);
  if (names.empty()) fail(ErrorKind::data, "corpus has no .ppm images: " + corpus_dir);

  std::vector<MetricsRecord> records;
  for (const std::string& name : names) {
    RasterImage clean = load_ppm_file((std::filesystem::path(corpus_dir) / name).string());
    ByteImage clean_bytes = quantize_image(clean);
    for (int q : qualities) {
      // One encode and one decode serve both the plain and the +AR mode.
      std::vector<std::uint8_t> jpeg_bytes, bcnn_bytes;
      RasterImage jpeg_rgb, bcnn_rgb;
      bool have_jpeg = false, have_bcnn = false;
      auto ensure_jpeg = [&]() {
        if (have_jpeg) return;
        jpeg_bytes = encode_image(clean, q, cs, nullptr);
        jpeg_rgb = decode_image(jpeg_bytes, nullptr);
        have_jpeg = true;
      };
      auto ensure_bcnn = [&]() {
        if (have_bcnn) return;
        bcnn_bytes = encode_image(clean, q, cs, pred);
        bcnn_rgb = decode_image(bcnn_bytes, pred);
        have_bcnn = true;
      };
      for (EvalMode m : modes) {
        MetricsRecord r;
        r.image = name;
        r.quality = q;
        r.mode = m;
        const std::vector<std::uint8_t>* bytes = nullptr;
        RasterImage out;
        switch (m) {
          case EvalMode::jpeg:
            ensure_jpeg();
            bytes = &jpeg_bytes;
            out = jpeg_rgb;
            break;
          case EvalMode::jpeg_ar:
            ensure_jpeg();
            bytes = &jpeg_bytes;
            out = enhance_image_rgb(jpeg_rgb, ar->net);
            break;
          case EvalMode::bcnn:
            ensure_bcnn();
            bytes = &bcnn_bytes;
            out = bcnn_rgb;
            break;
          case EvalMode::bcnn_ar:
            ensure_bcnn();
            bytes = &bcnn_bytes;
            out = enhance_image_rgb(bcnn_rgb, ar->net);
            break;
        }
        ByteImage out_bytes = quantize_image(out);
        r.bpp = bits_per_pixel(bytes->size(), clean.width, clean.height);
        r.psnr = psnr(out_bytes, clean_bytes);
        r.ssim = ssim(out_bytes, clean_bytes);
        records.push_back(std::move(r));
      }
    }
  }
  return records;
}

std::string records_to_csv(const std::vector<MetricsRecord>& records) {
  std::string out = "image,quality,mode,bpp,psnr,ssim\n";
  char buf[192];
  for (const MetricsRecord& r : records) {
    std::snprintf(buf, sizeof buf, "%s,%d,%s,%.17g,%.17g,%.17g\n", r.image.c_str(), r.quality,
                  eval_mode_name(r.mode), r.bpp, r.psnr, r.ssim);
    out += buf;
  }
  return out;
}

std::vector<MetricsRecord> records_from_csv(const std::string& csv) {
  std::vector<MetricsRecord> records;
  std::size_t pos = 0;
  bool first = true;
  while (pos < csv.size()) {
    std::size_t eol = csv.find('\n', pos);
    if (eol == std::string::npos) eol = csv.size();
    std::string line = csv.substr(pos, eol - pos);
    pos = eol + 1;
    if (line.empty()) continue;
    if (first) {
      if (line != "image,quality,mode,bpp,psnr,ssim") {
        fail(ErrorKind::parse, "metrics CSV has an unexpected header: " + line);
      }
      first = false;
      continue;
    }
    std::vector<std::string> fields;
    std::size_t fp = 0;
    while (true) {
      std::size_t comma = line.find(',', fp);
      if (comma == std::string::npos) {
        fields.push_back(line.substr(fp));
        break;
      }
      fields.push_back(line.substr(fp, comma - fp));
      fp = comma + 1;
    }
    if (fields.size() != 6) fail(ErrorKind::parse, "metrics CSV row has wrong field count: " + line);
    MetricsRecord r;
    r.image = fields[0];
    r.quality = std::atoi(fields[1].c_str());
    r.mode = eval_mode_from_name(fields[2]);
    r.bpp = std::strtod(fields[3].c_str(), nullptr);
    r.psnr = std::strtod(fields[4].c_str(), nullptr);
    r.ssim = std::strtod(fields[5].c_str(), nullptr);
    records.push_back(std::move(r));
  }
  return records;
}

}  // namespace bcn
