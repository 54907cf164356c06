// Neural network primitives: convolution, batch normalization, leaky ReLU,
// MSE loss, each with its reverse-mode companion. All loops run in a fixed
// order, so results do not depend on the worker count.
#pragma once

#include "core/tensor.hpp"

namespace bcn {

// Cross-correlation convolution + bias. x: [N,Cin,H,W], w: [Cout,Cin,k,k],
// b: [Cout]. Output dims follow floor((in + 2*pad - k)/stride) + 1.
Tensor conv2d_forward(const Tensor& x, const Tensor& w, const Tensor& b, int stride, int pad);

// Gradients wrt input, weights and bias. gw/gb are overwritten.
Tensor conv2d_backward(const Tensor& x, const Tensor& w, int stride, int pad, const Tensor& gy,
                       Tensor& gw, Tensor& gb);

struct BnCache {
  Tensor xhat;
  std::vector<float> inv_std;  // per channel
  std::size_t count = 0;       // N*H*W
  bool valid = false;
};

// Train mode normalizes by batch statistics (biased variance) and updates
// running stats in place with `running = (1-momentum)*running + momentum*batch`.
// Eval mode uses running stats only. Train mode requires batch >= 2.
Tensor batchnorm_forward(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                         Tensor& running_mean, Tensor& running_var, float momentum, float eps,
                         bool train, BnCache* cache);

Tensor batchnorm_backward(const Tensor& gy, const BnCache& cache, const Tensor& gamma,
                          Tensor& ggamma, Tensor& gbeta);

Tensor leaky_relu_forward(const Tensor& x, float slope);
Tensor leaky_relu_backward(const Tensor& gy, const Tensor& x, float slope);

// Returns mean over all elements of (pred-target)^2 and writes the gradient
// wrt pred (2*(p-t)/N) into grad when non-null.
double mse_loss(const Tensor& pred, const Tensor& target, Tensor* grad);

}  // namespace bcn
