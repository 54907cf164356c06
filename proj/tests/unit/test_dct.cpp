#include <cmath>
#include <random>

#include "core/dct.hpp"
#include "doctest.h"

using namespace bcn;

namespace {

DctBlock random_block(std::mt19937_64& rng, double lo, double hi) {
  DctBlock b;
  for (double& v : b) {
    v = lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1p-53);
  }
  return b;
}

double max_abs_diff(const DctBlock& a, const DctBlock& b) {
  double m = 0.0;
  for (int i = 0; i < 64; ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_SUITE("dct") {
  TEST_CASE("constant block 100 -> DC 800, AC zero") {
    DctBlock x;
    x.fill(100.0);
    DctBlock c = fdct_8x8(x);
    CHECK(c[0] == doctest::Approx(800.0).epsilon(1e-9));
    for (int i = 1; i < 64; ++i) CHECK(std::abs(c[i]) < 1e-3);
  }

  TEST_CASE("all-zero block maps to all-zero coefficients and back") {
    DctBlock z{};
    DctBlock c = fdct_8x8(z);
    for (double v : c) CHECK(v == doctest::Approx(0.0));
    DctBlock x = idct_8x8(z);
    for (double v : x) CHECK(v == doctest::Approx(0.0));
  }

  TEST_CASE("DC 800 inverts to constant 100") {
    DctBlock c{};
    c[0] = 800.0;
    DctBlock x = idct_8x8(c);
    for (double v : x) CHECK(v == doctest::Approx(100.0).epsilon(1e-9));
  }

  TEST_CASE("round trip within 1e-3 over random blocks") {
    std::mt19937_64 rng(42);
    double worst = 0.0;
    for (int i = 0; i < 2000; ++i) {
      DctBlock x = random_block(rng, -255.0, 255.0);
      worst = std::max(worst, max_abs_diff(idct_8x8(fdct_8x8(x)), x));
    }
    CHECK(worst < 1e-3);
    // and the reverse composition
    for (int i = 0; i < 500; ++i) {
      DctBlock c = random_block(rng, -1000.0, 1000.0);
      worst = std::max(worst, max_abs_diff(fdct_8x8(idct_8x8(c)), c));
    }
    CHECK(worst < 1e-3);
  }

  TEST_CASE("linearity of the inverse") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 200; ++i) {
      DctBlock a = random_block(rng, -500.0, 500.0);
      DctBlock b = random_block(rng, -500.0, 500.0);
      DctBlock sum;
      for (int j = 0; j < 64; ++j) sum[j] = a[j] + b[j];
      DctBlock lhs = idct_8x8(sum);
      DctBlock ia = idct_8x8(a), ib = idct_8x8(b);
      for (int j = 0; j < 64; ++j) CHECK(std::abs(lhs[j] - (ia[j] + ib[j])) < 1e-9);
    }
  }

  TEST_CASE("transform is orthonormal: basis images have unit norm and are orthogonal") {
    // With the DC = 8c convention the 2-D transform is exactly orthonormal,
    // so the Gram matrix of the transformed canonical basis is the identity.
    std::array<DctBlock, 64> basis;
    for (int i = 0; i < 64; ++i) {
      DctBlock e{};
      e[i] = 1.0;
      basis[i] = fdct_8x8(e);
    }
    for (int i = 0; i < 64; ++i) {
      for (int j = i; j < 64; ++j) {
        double dot = 0.0;
        for (int k = 0; k < 64; ++k) dot += basis[i][k] * basis[j][k];
        CHECK(std::abs(dot - (i == j ? 1.0 : 0.0)) < 1e-9);
      }
    }
  }

  TEST_CASE("energy preservation") {
    std::mt19937_64 rng(13);
    for (int i = 0; i < 200; ++i) {
      DctBlock x = random_block(rng, -255.0, 255.0);
      DctBlock c = fdct_8x8(x);
      double ex = 0.0, ec = 0.0;
      for (int j = 0; j < 64; ++j) {
        ex += x[j] * x[j];
        ec += c[j] * c[j];
      }
      CHECK(ec == doctest::Approx(ex).epsilon(1e-9));
    }
  }

  TEST_CASE("inverse equals transpose: <fdct(x), y> == <x, idct(y)>") {
    std::mt19937_64 rng(21);
    for (int i = 0; i < 100; ++i) {
      DctBlock x = random_block(rng, -100.0, 100.0);
      DctBlock y = random_block(rng, -100.0, 100.0);
      DctBlock fx = fdct_8x8(x);
      DctBlock iy = idct_8x8(y);
      double lhs = 0.0, rhs = 0.0;
      for (int j = 0; j < 64; ++j) {
        lhs += fx[j] * y[j];
        rhs += x[j] * iy[j];
      }
      CHECK(std::abs(lhs - rhs) < 1e-6);
    }
  }
}
