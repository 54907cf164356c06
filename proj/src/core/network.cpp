#include "core/network.hpp"

#include <cmath>
#include <random>

namespace bcn {

const char* variant_name(Variant v) { return v == Variant::ar ? "ar" : "pred"; }

namespace {

// Seeded He-normal initializer. Uniform doubles come straight from the
// engine's top 53 bits so the stream does not depend on library
// distribution internals.
class Gaussian {
 public:
  explicit Gaussian(std::uint64_t seed) : eng_(seed) {}

  float next(float stddev) {
    if (have_spare_) {
      have_spare_ = false;
      return static_cast<float>(spare_ * stddev);
    }
    double u1 = (static_cast<double>(eng_() >> 11) + 1.0) * 0x1p-53;  // (0,1]
    double u2 = static_cast<double>(eng_() >> 11) * 0x1p-53;          // [0,1)
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return static_cast<float>(r * std::cos(a) * stddev);
  }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

ConvLayer make_conv(Gaussian& rng, int in_ch, int out_ch, int stride, int pad) {
  ConvLayer l;
  l.stride = stride;
  l.pad = pad;
  l.w = Tensor::zeros({out_ch, in_ch, 3, 3});
  l.b = Tensor::zeros({out_ch});
  float stddev = std::sqrt(2.0f / static_cast<float>(in_ch * 9));
  for (float& v : l.w.data) v = rng.next(stddev);
  return l;
}

BnLayer make_bn(int ch) {
  BnLayer l;
  l.gamma = Tensor::zeros({ch});
  l.beta = Tensor::zeros({ch});
  l.running_mean = Tensor::zeros({ch});
  l.running_var = Tensor::zeros({ch});
  std::fill(l.gamma.data.begin(), l.gamma.data.end(), 1.0f);
  std::fill(l.running_var.data.begin(), l.running_var.data.end(), 1.0f);
  return l;
}

}  // namespace

struct Network::Tape {
  Tensor x;             // network input
  Tensor s1, a1;        // stem1 pre-activation / activation
  Tensor s2, a2;        // stem2 pre-activation / activation
  Tensor d;             // down conv output
  struct Block {
    Tensor in;          // residual input r_i
    Tensor c1, b1, a;   // conv1 out, bn1 out (pre-activation), lrelu out
    Tensor c2;          // conv2 out
    BnCache bn1, bn2;
  };
  std::vector<Block> blocks;
  Tensor last;          // r_N, input to head conv
};

Network::Network(Network&&) noexcept = default;
Network& Network::operator=(Network&&) noexcept = default;
Network::~Network() = default;

Network::Network(const ModelConfig& cfg) : cfg_(cfg) {
  if (cfg.channels < 8) fail(ErrorKind::argument, "model channels must be >= 8");
  if (cfg.n_res_blocks < 1) fail(ErrorKind::argument, "model needs at least one residual block");
  Gaussian rng(cfg.seed);
  stem1_ = make_conv(rng, 3, 32, 1, 1);
  stem2_ = make_conv(rng, 32, cfg.channels, 1, 1);
  down_ = make_conv(rng, cfg.channels, cfg.channels, 3, 0);
  res_.resize(cfg.n_res_blocks);
  for (ResBlock& rb : res_) {
    rb.conv1 = make_conv(rng, cfg.channels, cfg.channels, 1, 1);
    rb.bn1 = make_bn(cfg.channels);
    rb.conv2 = make_conv(rng, cfg.channels, cfg.channels, 1, 1);
    rb.bn2 = make_bn(cfg.channels);
  }
  head_ = make_conv(rng, cfg.channels, 3, 1, 1);
}

std::vector<Network::TensorRef> Network::named_tensors() {
  std::vector<TensorRef> out;
  auto conv = [&](const std::string& name, ConvLayer& l) {
    out.push_back({name + ".weight", &l.w, true});
    out.push_back({name + ".bias", &l.b, true});
  };
  auto bn = [&](const std::string& name, BnLayer& l) {
    out.push_back({name + ".gamma", &l.gamma, true});
    out.push_back({name + ".beta", &l.beta, true});
    out.push_back({name + ".running_mean", &l.running_mean, false});
    out.push_back({name + ".running_var", &l.running_var, false});
  };
  conv("stem1", stem1_);
  conv("stem2", stem2_);
  conv("down", down_);
  for (std::size_t i = 0; i < res_.size(); ++i) {
    std::string p = "res" + std::to_string(i);
    conv(p + ".conv1", res_[i].conv1);
    bn(p + ".bn1", res_[i].bn1);
    conv(p + ".conv2", res_[i].conv2);
    bn(p + ".bn2", res_[i].bn2);
  }
  conv("head", head_);
  return out;
}

std::vector<Tensor*> Network::trainable() {
  std::vector<Tensor*> out;
  for (const TensorRef& r : named_tensors()) {
    if (r.trainable) out.push_back(r.tensor);
  }
  return out;
}

std::size_t Network::trainable_count() {
  std::size_t n = 0;
  for (Tensor* t : trainable()) n += t->size();
  return n;
}

void Network::check(const Tensor& t, const char* where) const {
  for (float v : t.data) {
    if (!std::isfinite(v)) fail(ErrorKind::internal, std::string("non-finite value after ") + where);
  }
}

Tensor Network::forward(const Tensor& x, bool train) {
  if (x.rank != 4 || x.dims[1] != 3 || x.dims[2] != 24 || x.dims[3] != 24) {
    fail(ErrorKind::argument, "network input must be Nx3x24x24");
  }
  // Eval mode writes nothing to *this, so shared concurrent inference is safe.
  Tape* tp = nullptr;
  if (train) {
    tape_ = std::make_unique<Tape>();
    tp = tape_.get();
    tp->x = x;
    tp->blocks.resize(res_.size());
  }

  Tensor s1 = conv2d_forward(x, stem1_.w, stem1_.b, 1, 1);
  Tensor a1 = leaky_relu_forward(s1, kLReluSlope);
  if (tp) {
    tp->s1 = s1;
    tp->a1 = a1;
  }
  Tensor s2 = conv2d_forward(a1, stem2_.w, stem2_.b, 1, 1);
  Tensor a2 = leaky_relu_forward(s2, kLReluSlope);
  if (tp) {
    tp->s2 = s2;
    tp->a2 = a2;
  }
  Tensor cur = conv2d_forward(a2, down_.w, down_.b, 3, 0);
  check(cur, "down conv");
  if (tp) tp->d = cur;

  for (std::size_t i = 0; i < res_.size(); ++i) {
    ResBlock& rb = res_[i];
    Tape::Block* tb = tp ? &tp->blocks[i] : nullptr;
    if (tb) tb->in = cur;
    Tensor c1 = conv2d_forward(cur, rb.conv1.w, rb.conv1.b, 1, 1);
    Tensor b1 = batchnorm_forward(c1, rb.bn1.gamma, rb.bn1.beta, rb.bn1.running_mean,
                                  rb.bn1.running_var, kBnMomentum, kBnEps, train,
                                  tb ? &tb->bn1 : nullptr);
    Tensor a = leaky_relu_forward(b1, kLReluSlope);
    Tensor c2 = conv2d_forward(a, rb.conv2.w, rb.conv2.b, 1, 1);
    Tensor b2 = batchnorm_forward(c2, rb.bn2.gamma, rb.bn2.beta, rb.bn2.running_mean,
                                  rb.bn2.running_var, kBnMomentum, kBnEps, train,
                                  tb ? &tb->bn2 : nullptr);
    if (tb) {
      tb->c1 = std::move(c1);
      tb->b1 = b1;
      tb->a = std::move(a);
      tb->c2 = std::move(c2);
    }
    for (std::size_t j = 0; j < cur.data.size(); ++j) cur.data[j] += b2.data[j];
    check(cur, "residual block");
  }
  if (tp) tp->last = cur;

  Tensor y = conv2d_forward(cur, head_.w, head_.b, 1, 1);
  check(y, "head conv");
  return y;
}

std::vector<Tensor> Network::backward(const Tensor& gy) {
  if (!tape_) fail(ErrorKind::state, "backward called without a train-mode forward");
  Tape& tp = *tape_;
  std::vector<Tensor> grads;
  // Gradients are produced back-to-front, then reversed into trainable() order.
  std::vector<Tensor> rev;

  Tensor gw, gb;
  Tensor g = conv2d_backward(tp.last, head_.w, 1, 1, gy, gw, gb);
  rev.push_back(gb);
  rev.push_back(gw);

  for (std::size_t ii = res_.size(); ii-- > 0;) {
    ResBlock& rb = res_[ii];
    Tape::Block& tb = tp.blocks[ii];
    Tensor ggamma2, gbeta2, ggamma1, gbeta1;
    Tensor gc2 = batchnorm_backward(g, tb.bn2, rb.bn2.gamma, ggamma2, gbeta2);
    Tensor ga = conv2d_backward(tb.a, rb.conv2.w, 1, 1, gc2, gw, gb);
    Tensor gconv2_w = gw, gconv2_b = gb;
    Tensor gb1 = leaky_relu_backward(ga, tb.b1, kLReluSlope);
    Tensor gc1 = batchnorm_backward(gb1, tb.bn1, rb.bn1.gamma, ggamma1, gbeta1);
    Tensor gin = conv2d_backward(tb.in, rb.conv1.w, 1, 1, gc1, gw, gb);
    // skip path: upstream gradient flows through unchanged
    for (std::size_t j = 0; j < g.data.size(); ++j) gin.data[j] += g.data[j];
    rev.push_back(gbeta2);
    rev.push_back(ggamma2);
    rev.push_back(gconv2_b);
    rev.push_back(gconv2_w);
    rev.push_back(gbeta1);
    rev.push_back(ggamma1);
    rev.push_back(gb);
    rev.push_back(gw);
    g = std::move(gin);
  }

  Tensor ga2 = conv2d_backward(tp.a2, down_.w, 3, 0, g, gw, gb);
  rev.push_back(gb);
  rev.push_back(gw);
  Tensor gs2 = leaky_relu_backward(ga2, tp.s2, kLReluSlope);
  Tensor ga1 = conv2d_backward(tp.a1, stem2_.w, 1, 1, gs2, gw, gb);
  rev.push_back(gb);
  rev.push_back(gw);
  Tensor gs1 = leaky_relu_backward(ga1, tp.s1, kLReluSlope);
  conv2d_backward(tp.x, stem1_.w, 1, 1, gs1, gw, gb);
  rev.push_back(gb);
  rev.push_back(gw);

  tape_.reset();
  grads.reserve(rev.size());
  for (std::size_t i = rev.size(); i-- > 0;) grads.push_back(std::move(rev[i]));
  for (const Tensor& t : grads) check(t, "backward");
  return grads;
}

}  // namespace bcn
