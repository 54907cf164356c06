#include "core/dct.hpp"

namespace bcn {

namespace {

// basis[u][x] = 0.5 * C(u) * cos((2x+1) u pi / 16), C(0) = 1/sqrt(2).
// Orthogonal, so the inverse is the transpose. Stored as literals so the
// transform does not depend on the platform's cos().
constexpr double kBasis[8][8] = {
    {0.35355339059327376, 0.35355339059327376, 0.35355339059327376, 0.35355339059327376, 0.35355339059327376, 0.35355339059327376, 0.35355339059327376, 0.35355339059327376},
    {0.49039264020161522, 0.41573480615127262, 0.27778511650980111, 0.097545161008064134, -0.097545161008064134, -0.27778511650980111, -0.41573480615127262, -0.49039264020161522},
    {0.46193976625564338, 0.19134171618254489, -0.19134171618254489, -0.46193976625564338, -0.46193976625564338, -0.19134171618254489, 0.19134171618254489, 0.46193976625564338},
    {0.41573480615127262, -0.097545161008064134, -0.49039264020161522, -0.27778511650980111, 0.27778511650980111, 0.49039264020161522, 0.097545161008064134, -0.41573480615127262},
    {0.35355339059327376, -0.35355339059327376, -0.35355339059327376, 0.35355339059327376, 0.35355339059327376, -0.35355339059327376, -0.35355339059327376, 0.35355339059327376},
    {0.27778511650980111, -0.49039264020161522, 0.097545161008064134, 0.41573480615127262, -0.41573480615127262, -0.097545161008064134, 0.49039264020161522, -0.27778511650980111},
    {0.19134171618254489, -0.46193976625564338, 0.46193976625564338, -0.19134171618254489, -0.19134171618254489, 0.46193976625564338, -0.46193976625564338, 0.19134171618254489},
    {0.097545161008064134, -0.27778511650980111, 0.41573480615127262, -0.49039264020161522, 0.49039264020161522, -0.41573480615127262, 0.27778511650980111, -0.097545161008064134},
};

}  // namespace

DctBlock fdct_8x8(const DctBlock& block) {
  // rows: tmp = block * B^T, then out = B * tmp
  double tmp[64];
  for (int y = 0; y < 8; ++y) {
    for (int u = 0; u < 8; ++u) {
      double s = 0.0;
      for (int x = 0; x < 8; ++x) s += block[y * 8 + x] * kBasis[u][x];
      tmp[y * 8 + u] = s;
    }
  }
  DctBlock out;
  for (int v = 0; v < 8; ++v) {
    for (int u = 0; u < 8; ++u) {
      double s = 0.0;
      for (int y = 0; y < 8; ++y) s += kBasis[v][y] * tmp[y * 8 + u];
      out[v * 8 + u] = s;
    }
  }
  return out;
}

DctBlock idct_8x8(const DctBlock& coeffs) {
  double tmp[64];
  for (int v = 0; v < 8; ++v) {
    for (int x = 0; x < 8; ++x) {
      double s = 0.0;
      for (int u = 0; u < 8; ++u) s += coeffs[v * 8 + u] * kBasis[u][x];
      tmp[v * 8 + x] = s;
    }
  }
  DctBlock out;
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 8; ++x) {
      double s = 0.0;
      for (int v = 0; v < 8; ++v) s += kBasis[v][y] * tmp[v * 8 + x];
      out[y * 8 + x] = s;
    }
  }
  return out;
}

}  // namespace bcn
