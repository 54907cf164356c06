#pragma once

#include <array>
#include <string>
#include <vector>

#include "core/image.hpp"
#include "core/model.hpp"

namespace bcn {

// Peak signal-to-noise ratio over all three channels jointly on the 0-255
// scale. Identical images report the documented 99 dB cap.
double psnr(const ByteImage& a, const ByteImage& b);

// Structural similarity on the luma channel: 11x11 Gaussian window with
// sigma 1.5, C1=(0.01*255)^2, C2=(0.03*255)^2, averaged over positions
// where the window fits entirely. RGB inputs are reduced to luma first.
double ssim(const ByteImage& a, const ByteImage& b);

double bits_per_pixel(std::size_t byte_count, int width, int height);

// Fig.-2-style statistic: mean squared luma error of a JPEG round trip at
// `quality`, accumulated separately for each of the 64 within-block pixel
// positions over all blocks of all images. Index = (y%8)*8 + (x%8).
// Sums are integer-exact, so the grid is independent of corpus order and
// concatenating corpora obeys the weighted mean law exactly.
struct PositionAccum {
  std::array<std::int64_t, 64> sum{};
  std::int64_t blocks = 0;
};
PositionAccum block_position_accumulate(const std::vector<RasterImage>& images, int quality);
std::array<double, 64> block_position_finish(const PositionAccum& acc);

std::array<double, 64> block_position_mse(const std::vector<RasterImage>& images, int quality);
std::array<double, 64> block_position_mse_dir(const std::string& corpus_dir, int quality);

std::string grid_to_csv(const std::array<double, 64>& grid);                 // 8 rows x 8 values
std::vector<std::uint8_t> grid_to_pgm(const std::array<double, 64>& grid);   // 256x256 heat image

enum class EvalMode { jpeg, jpeg_ar, bcnn, bcnn_ar };
const char* eval_mode_name(EvalMode m);                 // JPEG, JPEG+AR, BCNN, BCNN+AR
EvalMode eval_mode_from_name(const std::string& name);  // case-insensitive, accepts "jpeg+ar" etc.

struct MetricsRecord {
  std::string image;
  int quality = 0;
  EvalMode mode = EvalMode::jpeg;
  double bpp = 0.0;
  double psnr = 0.0;
  double ssim = 0.0;
};

// Full cross product corpus x qualities x modes. AR model required for the
// +AR modes, PRED model for the BCNN modes; a missing one is a
// configuration error. Pipeline colorspace is `cs` for all modes.
std::vector<MetricsRecord> rd_sweep(const std::string& corpus_dir, const std::vector<int>& qualities,
                                    const std::vector<EvalMode>& modes, Model* ar, Model* pred,
                                    Colorspace cs);

// CSV with header image,quality,mode,bpp,psnr,ssim; floats printed so that
// re-parsing reproduces the records exactly.
std::string records_to_csv(const std::vector<MetricsRecord>& records);
std::vector<MetricsRecord> records_from_csv(const std::string& csv);

}  // namespace bcn
