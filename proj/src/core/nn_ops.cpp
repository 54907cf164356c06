#include "core/nn_ops.hpp"

#include <cmath>

#include "core/threading.hpp"

namespace bcn {

namespace {

inline int conv_out_dim(int in, int k, int stride, int pad) {
  return (in + 2 * pad - k) / stride + 1;
}

// Valid output range for a kernel tap so the source index stays in [0, in).
inline void tap_range(int out_dim, int in_dim, int stride, int pad, int k_off, int& lo, int& hi) {
  // src = out*stride + k_off - pad
  lo = 0;
  while (lo < out_dim && lo * stride + k_off - pad < 0) ++lo;
  hi = out_dim;
  while (hi > lo && (hi - 1) * stride + k_off - pad >= in_dim) --hi;
}

}  // namespace

Tensor conv2d_forward(const Tensor& x, const Tensor& w, const Tensor& b, int stride, int pad) {
  if (x.rank != 4 || w.rank != 4 || b.rank != 1) fail(ErrorKind::argument, "conv2d: bad ranks");
  int N = x.dims[0], Cin = x.dims[1], H = x.dims[2], W = x.dims[3];
  int Cout = w.dims[0], k = w.dims[2];
  if (w.dims[1] != Cin) {
    fail(ErrorKind::argument, "conv2d: weight expects " + std::to_string(w.dims[1]) +
                                  " input channels, got " + std::to_string(Cin));
  }
  if (w.dims[3] != k || b.dims[0] != Cout) fail(ErrorKind::argument, "conv2d: inconsistent kernel/bias");
  int OH = conv_out_dim(H, k, stride, pad), OW = conv_out_dim(W, k, stride, pad);
  if (OH < 1 || OW < 1) fail(ErrorKind::argument, "conv2d: empty output");

  Tensor y = Tensor::zeros({N, Cout, OH, OW});
  parallel_for(static_cast<std::size_t>(N) * Cout, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t job = lo; job < hi; ++job) {
      int n = static_cast<int>(job) / Cout;
      int oc = static_cast<int>(job) % Cout;
      float* out = y.plane(n, oc);
      float bias = b.data[oc];
      for (int i = 0; i < OH * OW; ++i) out[i] = bias;
      for (int ic = 0; ic < Cin; ++ic) {
        const float* in = x.plane(n, ic);
        for (int ky = 0; ky < k; ++ky) {
          int oy_lo, oy_hi;
          tap_range(OH, H, stride, pad, ky, oy_lo, oy_hi);
          for (int kx = 0; kx < k; ++kx) {
            int ox_lo, ox_hi;
            tap_range(OW, W, stride, pad, kx, ox_lo, ox_hi);
            float wv = w.data[((static_cast<std::size_t>(oc) * Cin + ic) * k + ky) * k + kx];
            if (wv == 0.0f) continue;
            for (int oy = oy_lo; oy < oy_hi; ++oy) {
              const float* src = in + (oy * stride + ky - pad) * W + (ox_lo * stride + kx - pad);
              float* dst = out + oy * OW + ox_lo;
              int len = ox_hi - ox_lo;
              if (stride == 1) {
                for (int i = 0; i < len; ++i) dst[i] += wv * src[i];
              } else {
                for (int i = 0; i < len; ++i) dst[i] += wv * src[i * stride];
              }
            }
          }
        }
      }
    }
  });
  return y;
}

Tensor conv2d_backward(const Tensor& x, const Tensor& w, int stride, int pad, const Tensor& gy,
                       Tensor& gw, Tensor& gb) {
  int N = x.dims[0], Cin = x.dims[1], H = x.dims[2], W = x.dims[3];
  int Cout = w.dims[0], k = w.dims[2];
  int OH = gy.dims[2], OW = gy.dims[3];
  if (gy.dims[0] != N || gy.dims[1] != Cout) fail(ErrorKind::argument, "conv2d backward: bad gradient shape");

  gw = Tensor::zeros({Cout, Cin, k, k});
  gb = Tensor::zeros({Cout});
  Tensor gx = Tensor::zeros({N, Cin, H, W});

  // bias grad: sum of gy per output channel
  parallel_for(static_cast<std::size_t>(Cout), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t oc = lo; oc < hi; ++oc) {
      double s = 0.0;
      for (int n = 0; n < N; ++n) {
        const float* g = gy.plane(n, static_cast<int>(oc));
        for (int i = 0; i < OH * OW; ++i) s += g[i];
      }
      gb.data[oc] = static_cast<float>(s);
    }
  });

  // weight grad: per (oc, ic) slot, serial over batch and space
  parallel_for(static_cast<std::size_t>(Cout) * Cin, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t job = lo; job < hi; ++job) {
      int oc = static_cast<int>(job) / Cin;
      int ic = static_cast<int>(job) % Cin;
      for (int ky = 0; ky < k; ++ky) {
        int oy_lo, oy_hi;
        tap_range(OH, H, stride, pad, ky, oy_lo, oy_hi);
        for (int kx = 0; kx < k; ++kx) {
          int ox_lo, ox_hi;
          tap_range(OW, W, stride, pad, kx, ox_lo, ox_hi);
          double acc = 0.0;
          for (int n = 0; n < N; ++n) {
            const float* g = gy.plane(n, oc);
            const float* in = x.plane(n, ic);
            for (int oy = oy_lo; oy < oy_hi; ++oy) {
              const float* src = in + (oy * stride + ky - pad) * W + (ox_lo * stride + kx - pad);
              const float* grow = g + oy * OW + ox_lo;
              int len = ox_hi - ox_lo;
              if (stride == 1) {
                for (int i = 0; i < len; ++i) acc += static_cast<double>(grow[i]) * src[i];
              } else {
                for (int i = 0; i < len; ++i) acc += static_cast<double>(grow[i]) * src[i * stride];
              }
            }
          }
          gw.data[((static_cast<std::size_t>(oc) * Cin + ic) * k + ky) * k + kx] = static_cast<float>(acc);
        }
      }
    }
  });

  // input grad: per (n, ic), serial over output channels
  parallel_for(static_cast<std::size_t>(N) * Cin, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t job = lo; job < hi; ++job) {
      int n = static_cast<int>(job) / Cin;
      int ic = static_cast<int>(job) % Cin;
      float* gin = gx.plane(n, ic);
      for (int oc = 0; oc < Cout; ++oc) {
        const float* g = gy.plane(n, oc);
        for (int ky = 0; ky < k; ++ky) {
          int oy_lo, oy_hi;
          tap_range(OH, H, stride, pad, ky, oy_lo, oy_hi);
          for (int kx = 0; kx < k; ++kx) {
            int ox_lo, ox_hi;
            tap_range(OW, W, stride, pad, kx, ox_lo, ox_hi);
            float wv = w.data[((static_cast<std::size_t>(oc) * Cin + ic) * k + ky) * k + kx];
            if (wv == 0.0f) continue;
            for (int oy = oy_lo; oy < oy_hi; ++oy) {
              float* dst = gin + (oy * stride + ky - pad) * W + (ox_lo * stride + kx - pad);
              const float* grow = g + oy * OW + ox_lo;
              int len = ox_hi - ox_lo;
              if (stride == 1) {
                for (int i = 0; i < len; ++i) dst[i] += wv * grow[i];
              } else {
                for (int i = 0; i < len; ++i) dst[i * stride] += wv * grow[i];
              }
            }
          }
        }
      }
    }
  });
  return gx;
}

Tensor batchnorm_forward(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                         Tensor& running_mean, Tensor& running_var, float momentum, float eps,
                         bool train, BnCache* cache) {
  if (x.rank != 4) fail(ErrorKind::argument, "batchnorm: rank-4 input required");
  int N = x.dims[0], C = x.dims[1], H = x.dims[2], W = x.dims[3];
  if (gamma.dims[0] != C || beta.dims[0] != C || running_mean.dims[0] != C || running_var.dims[0] != C) {
    fail(ErrorKind::argument, "batchnorm: parameter shape mismatch");
  }
  if (train && N < 2) fail(ErrorKind::argument, "batchnorm: train mode needs batch size >= 2");

  Tensor y = Tensor::zeros({N, C, H, W});
  std::size_t plane = static_cast<std::size_t>(H) * W;
  std::size_t count = static_cast<std::size_t>(N) * plane;

  if (cache) {
    cache->inv_std.assign(C, 0.0f);
    cache->count = count;
    cache->valid = train;
    if (train) cache->xhat = Tensor::zeros({N, C, H, W});
  }

  parallel_for(static_cast<std::size_t>(C), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t ci = lo; ci < hi; ++ci) {
      int c = static_cast<int>(ci);
      float mean, inv_std;
      if (train) {
        double s = 0.0;
        for (int n = 0; n < N; ++n) {
          const float* p = x.plane(n, c);
          for (std::size_t i = 0; i < plane; ++i) s += p[i];
        }
        double m = s / static_cast<double>(count);
        double v = 0.0;
        for (int n = 0; n < N; ++n) {
          const float* p = x.plane(n, c);
          for (std::size_t i = 0; i < plane; ++i) {
            double d = p[i] - m;
            v += d * d;
          }
        }
        v /= static_cast<double>(count);
        mean = static_cast<float>(m);
        inv_std = static_cast<float>(1.0 / std::sqrt(v + eps));
        running_mean.data[c] = (1.0f - momentum) * running_mean.data[c] + momentum * mean;
        running_var.data[c] = (1.0f - momentum) * running_var.data[c] + momentum * static_cast<float>(v);
      } else {
        mean = running_mean.data[c];
        inv_std = 1.0f / std::sqrt(running_var.data[c] + eps);
      }
      if (cache) cache->inv_std[c] = inv_std;
      float g = gamma.data[c], bt = beta.data[c];
      for (int n = 0; n < N; ++n) {
        const float* p = x.plane(n, c);
        float* out = y.plane(n, c);
        float* xh = (cache && train) ? cache->xhat.plane(n, c) : nullptr;
        for (std::size_t i = 0; i < plane; ++i) {
          float h = (p[i] - mean) * inv_std;
          if (xh) xh[i] = h;
          out[i] = g * h + bt;
        }
      }
    }
  });
  return y;
}

Tensor batchnorm_backward(const Tensor& gy, const BnCache& cache, const Tensor& gamma,
                          Tensor& ggamma, Tensor& gbeta) {
  if (!cache.valid) fail(ErrorKind::state, "batchnorm backward without a train-mode forward");
  int N = gy.dims[0], C = gy.dims[1], H = gy.dims[2], W = gy.dims[3];
  require_shape(gy, cache.xhat, "batchnorm backward");

  Tensor gx = Tensor::zeros({N, C, H, W});
  ggamma = Tensor::zeros({C});
  gbeta = Tensor::zeros({C});
  std::size_t plane = static_cast<std::size_t>(H) * W;
  double count = static_cast<double>(cache.count);

  parallel_for(static_cast<std::size_t>(C), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t ci = lo; ci < hi; ++ci) {
      int c = static_cast<int>(ci);
      double sum_g = 0.0, sum_gx = 0.0;
      for (int n = 0; n < N; ++n) {
        const float* g = gy.plane(n, c);
        const float* xh = cache.xhat.plane(n, c);
        for (std::size_t i = 0; i < plane; ++i) {
          sum_g += g[i];
          sum_gx += static_cast<double>(g[i]) * xh[i];
        }
      }
      ggamma.data[c] = static_cast<float>(sum_gx);
      gbeta.data[c] = static_cast<float>(sum_g);
      float gscale = gamma.data[c] * cache.inv_std[c];
      float mg = static_cast<float>(sum_g / count);
      float mgx = static_cast<float>(sum_gx / count);
      for (int n = 0; n < N; ++n) {
        const float* g = gy.plane(n, c);
        const float* xh = cache.xhat.plane(n, c);
        float* out = gx.plane(n, c);
        for (std::size_t i = 0; i < plane; ++i) {
          out[i] = gscale * (g[i] - mg - xh[i] * mgx);
        }
      }
    }
  });
  return gx;
}

Tensor leaky_relu_forward(const Tensor& x, float slope) {
  Tensor y = x;
  for (float& v : y.data) {
    if (v < 0.0f) v *= slope;
  }
  return y;
}

Tensor leaky_relu_backward(const Tensor& gy, const Tensor& x, float slope) {
  require_shape(gy, x, "leaky_relu backward");
  Tensor gx = gy;
  for (std::size_t i = 0; i < gx.data.size(); ++i) {
    if (x.data[i] < 0.0f) gx.data[i] *= slope;
  }
  return gx;
}

double mse_loss(const Tensor& pred, const Tensor& target, Tensor* grad) {
  require_shape(pred, target, "mse_loss");
  std::size_t n = pred.size();
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double d = static_cast<double>(pred.data[i]) - target.data[i];
    acc += d * d;
  }
  double loss = acc / static_cast<double>(n);
  if (grad) {
    *grad = pred;
    float scale = 2.0f / static_cast<float>(n);
    for (std::size_t i = 0; i < n; ++i) {
      grad->data[i] = scale * (pred.data[i] - target.data[i]);
    }
  }
  return loss;
}

}  // namespace bcn
