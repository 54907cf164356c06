#pragma once

#include <memory>
#include <string>
#include <vector>

#include "core/image.hpp"
#include "core/nn_ops.hpp"
#include "core/tensor.hpp"

namespace bcn {

enum class Variant : unsigned char { ar = 0, pred = 1 };

const char* variant_name(Variant v);

struct ModelConfig {
  Variant variant = Variant::ar;
  int channels = 64;
  int n_res_blocks = 9;
  Colorspace colorspace = Colorspace::ycbcr;  // runtime property, not serialized
  std::uint64_t seed = 0;
};

struct ConvLayer {
  Tensor w, b;
  int stride = 1, pad = 1;
};

struct BnLayer {
  Tensor gamma, beta, running_mean, running_var;
};

struct ResBlock {
  ConvLayer conv1, conv2;
  BnLayer bn1, bn2;
};

// Fixed topology mapping a 24x24x3 context to an 8x8x3 block:
//   stem1 conv3x3 s1 (3->32), leaky ReLU
//   stem2 conv3x3 s1 (32->channels), leaky ReLU
//   down  conv3x3 s3 pad0 (channels->channels), 24x24 -> 8x8
//   n_res_blocks x [conv->BN->LReLU->conv->BN, + skip]
//   head  conv3x3 s1 (channels->3)
class Network {
 public:
  static constexpr float kLReluSlope = 0.2f;
  static constexpr float kBnMomentum = 0.1f;
  static constexpr float kBnEps = 1e-5f;

  explicit Network(const ModelConfig& cfg);
  Network(Network&&) noexcept;
  Network& operator=(Network&&) noexcept;
  ~Network();

  const ModelConfig& config() const { return cfg_; }
  void set_colorspace(Colorspace cs) { cfg_.colorspace = cs; }

  struct TensorRef {
    std::string name;
    Tensor* tensor;
    bool trainable;
  };
  // All tensors in checkpoint order (parameters and BN running stats).
  std::vector<TensorRef> named_tensors();
  // Trainable parameters in optimizer order (subsequence of named_tensors).
  std::vector<Tensor*> trainable();
  std::size_t trainable_count();  // total trainable scalars

  // train=true records activations for backward and updates BN running
  // stats; train=false runs BN from running stats and records nothing.
  Tensor forward(const Tensor& x, bool train);
  // Gradients for every trainable parameter, in trainable() order.
  // Requires a preceding train-mode forward; consumes the recorded tape.
  std::vector<Tensor> backward(const Tensor& gy);

 private:
  struct Tape;
  void check(const Tensor& t, const char* where) const;

  ModelConfig cfg_;
  ConvLayer stem1_, stem2_, down_, head_;
  std::vector<ResBlock> res_;
  std::unique_ptr<Tape> tape_;
};

}  // namespace bcn
