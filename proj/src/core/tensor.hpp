// Row-major float32 tensor, up to 4 dims. Activations are NCHW.
#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <vector>

#include "core/common.hpp"

namespace bcn {

struct Tensor {
  int rank = 0;
  std::array<int, 4> dims{1, 1, 1, 1};
  std::vector<float> data;

  Tensor() = default;

  static Tensor zeros(std::initializer_list<int> shape) {
    Tensor t;
    t.rank = static_cast<int>(shape.size());
    if (t.rank < 1 || t.rank > 4) fail(ErrorKind::argument, "tensor rank must be 1..4");
    int i = 0;
    std::size_t n = 1;
    for (int d : shape) {
      if (d < 1) fail(ErrorKind::argument, "tensor dims must be positive");
      t.dims[i++] = d;
      n *= static_cast<std::size_t>(d);
    }
    t.data.assign(n, 0.0f);
    return t;
  }

  std::size_t size() const { return data.size(); }

  bool same_shape(const Tensor& o) const { return rank == o.rank && dims == o.dims; }

  // NCHW accessors (rank 4 only)
  float& at(int n, int c, int y, int x) {
    return data[((static_cast<std::size_t>(n) * dims[1] + c) * dims[2] + y) * dims[3] + x];
  }
  float at(int n, int c, int y, int x) const {
    return data[((static_cast<std::size_t>(n) * dims[1] + c) * dims[2] + y) * dims[3] + x];
  }

  float* plane(int n, int c) { return data.data() + (static_cast<std::size_t>(n) * dims[1] + c) * dims[2] * dims[3]; }
  const float* plane(int n, int c) const {
    return data.data() + (static_cast<std::size_t>(n) * dims[1] + c) * dims[2] * dims[3];
  }
};

inline void require_shape(const Tensor& t, const Tensor& o, const char* what) {
  if (!t.same_shape(o)) fail(ErrorKind::argument, std::string(what) + ": tensor shape mismatch");
}

}  // namespace bcn
