#pragma once

#include <vector>

#include "core/tensor.hpp"

namespace bcn {

// Classic Adam with L2 regularization folded into the gradient.
struct AdamConfig {
  float lr = 1e-3f;
  float beta1 = 0.9f;
  float beta2 = 0.999f;
  float eps = 1e-8f;
  float weight_decay = 0.0f;
};

struct AdamState {
  std::vector<Tensor> m;  // first moment, one per parameter
  std::vector<Tensor> v;  // second moment
  long long step = 0;
};

// Initializes moment buffers matching the given parameter shapes.
AdamState adam_init(const std::vector<Tensor*>& params);

// One update step over all parameters. `decay_mask[i]` selects which
// parameters receive weight decay (biases and norm parameters usually don't).
void adam_step(AdamState& state, const AdamConfig& cfg, const std::vector<Tensor*>& params,
               const std::vector<const Tensor*>& grads, const std::vector<bool>& decay_mask);

}  // namespace bcn
