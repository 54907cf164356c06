#include "core/adam.hpp"

#include <cmath>

#include "core/common.hpp"

namespace bcn {

AdamState adam_init(const std::vector<Tensor*>& params) {
  AdamState st;
  st.m.reserve(params.size());
  st.v.reserve(params.size());
  for (const Tensor* p : params) {
    Tensor z = *p;
    std::fill(z.data.begin(), z.data.end(), 0.0f);
    st.m.push_back(z);
    st.v.push_back(std::move(z));
  }
  return st;
}

void adam_step(AdamState& state, const AdamConfig& cfg, const std::vector<Tensor*>& params,
               const std::vector<const Tensor*>& grads, const std::vector<bool>& decay_mask) {
  if (params.size() != grads.size() || params.size() != decay_mask.size() ||
      params.size() != state.m.size()) {
    fail(ErrorKind::argument, "adam_step: parameter/gradient count mismatch");
  }
  state.step += 1;
  double bc1 = 1.0 - std::pow(static_cast<double>(cfg.beta1), static_cast<double>(state.step));
  double bc2 = 1.0 - std::pow(static_cast<double>(cfg.beta2), static_cast<double>(state.step));
  float lr_t = static_cast<float>(cfg.lr * std::sqrt(bc2) / bc1);

  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    Tensor& p = *params[pi];
    const Tensor& g = *grads[pi];
    Tensor& m = state.m[pi];
    Tensor& v = state.v[pi];
    if (g.size() != p.size()) fail(ErrorKind::argument, "adam_step: gradient shape mismatch");
    float wd = decay_mask[pi] ? cfg.weight_decay : 0.0f;
    for (std::size_t i = 0; i < p.data.size(); ++i) {
      float gi = g.data[i] + wd * p.data[i];
      m.data[i] = cfg.beta1 * m.data[i] + (1.0f - cfg.beta1) * gi;
      v.data[i] = cfg.beta2 * v.data[i] + (1.0f - cfg.beta2) * gi * gi;
      p.data[i] -= lr_t * m.data[i] / (std::sqrt(v.data[i]) + cfg.eps);
    }
  }
}

}  // namespace bcn
