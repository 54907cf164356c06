#include "core/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>

#include "core/adam.hpp"
#include "core/baseline_jpeg.hpp"
#include "core/checkpoint.hpp"
#include "core/io.hpp"

namespace bcn {

namespace {

constexpr int kValPairs = 256;
constexpr int kEvalBatch = 64;

// Unbiased bounded draw, independent of library distribution internals.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
  std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    std::uint64_t r = rng();
    if (r >= threshold) return r % n;
  }
}

void sample_into(const Corpus& corpus, const std::vector<int>& subset, Variant variant,
                 std::mt19937_64& rng, int count, std::vector<TrainPair>& out) {
  for (int i = 0; i < count; ++i) {
    const Corpus::Entry& e = corpus.entries[subset[bounded(rng, subset.size())]];
    int bx = static_cast<int>(bounded(rng, static_cast<std::uint64_t>(e.clean.blocks_x())));
    int by = static_cast<int>(bounded(rng, static_cast<std::uint64_t>(e.clean.blocks_y())));
    TrainPair p;
    make_training_pair_from(e.clean, e.degraded, bx, by, variant, &p.input, &p.target);
    out.push_back(std::move(p));
  }
}

// Network-domain batch tensors. For AR the target is the residual the
// network must emit (clean minus degraded centre); for PRED it is the
// clean block itself.
void pairs_to_tensors(const std::vector<TrainPair>& pairs, Variant variant, Tensor& x, Tensor& t) {
  int n = static_cast<int>(pairs.size());
  x = Tensor::zeros({n, 3, 24, 24});
  t = Tensor::zeros({n, 3, 8, 8});
  for (int i = 0; i < n; ++i) {
    float* xd = x.data.data() + static_cast<std::size_t>(i) * 3 * 576;
    for (std::size_t j = 0; j < 3 * 576; ++j) xd[j] = to_network_domain(pairs[i].input.samples[j]);
    float* td = t.data.data() + static_cast<std::size_t>(i) * 3 * 64;
    if (variant == Variant::ar) {
      Block8 center = pairs[i].input.center();
      for (std::size_t j = 0; j < 3 * 64; ++j) {
        td[j] = to_network_domain(pairs[i].target.samples[j]) -
                to_network_domain(center.samples[j]);
      }
    } else {
      for (std::size_t j = 0; j < 3 * 64; ++j) td[j] = to_network_domain(pairs[i].target.samples[j]);
    }
  }
}

double eval_pairs(Network& net, const std::vector<TrainPair>& pairs, Variant variant) {
  double total = 0.0;
  std::size_t done = 0;
  while (done < pairs.size()) {
    std::size_t n = std::min<std::size_t>(kEvalBatch, pairs.size() - done);
    std::vector<TrainPair> chunk(pairs.begin() + done, pairs.begin() + done + n);
    Tensor x, t;
    pairs_to_tensors(chunk, variant, x, t);
    Tensor y = net.forward(x, /*train=*/false);
    total += mse_loss(y, t, nullptr) * static_cast<double>(n);
    done += n;
  }
  return total / static_cast<double>(pairs.size());
}

std::string format_row(long long step, double train_mse, double val_mse, double wallclock) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%lld,%.17g,%.17g,%.3f\n", step, train_mse, val_mse, wallclock);
  return buf;
}

}  // namespace

Corpus load_corpus(const std::string& dir, int quality, Colorspace cs) {
  if (quality < 1 || quality > 100) fail(ErrorKind::argument, "quality must be in 1..100");
  namespace fs = std::filesystem;
  std::vector<std::string> names = list_ppm_files(dir);
  if (names.empty()) fail(ErrorKind::data, "corpus has no .ppm images: " + dir);

  Corpus corpus;
  corpus.quality = quality;
  corpus.colorspace = cs;
  for (const std::string& name : names) {
    Corpus::Entry e;
    e.name = name;
    try {
      RasterImage rgb = load_ppm_file((fs::path(dir) / name).string());
      e.clean = pad_to_block_multiple(quantize_image(convert_colorspace(rgb, cs)));
    } catch (const Error& err) {
      fail(ErrorKind::data, "corpus image " + name + " is unusable: " + err.what());
    }
    e.degraded = baseline_roundtrip(e.clean, quality);
    corpus.entries.push_back(std::move(e));
  }
  return corpus;
}

std::vector<TrainPair> sample_pairs(const Corpus& corpus, const std::vector<int>& subset,
                                    Variant variant, std::uint64_t seed, int count) {
  if (subset.empty()) fail(ErrorKind::data, "no corpus images to sample from");
  for (int i : subset) {
    if (i < 0 || i >= static_cast<int>(corpus.entries.size())) {
      fail(ErrorKind::argument, "corpus subset index out of range");
    }
  }
  if (count < 1) fail(ErrorKind::argument, "pair count must be positive");
  std::vector<TrainPair> out;
  out.reserve(static_cast<std::size_t>(count));
  std::mt19937_64 rng(seed);
  sample_into(corpus, subset, variant, rng, count, out);
  return out;
}

TrainResult train(const TrainConfig& cfg, const TrainProgress& progress) {
  if (cfg.iterations < 1) fail(ErrorKind::argument, "iterations must be >= 1");
  if (cfg.batch_size < 2) fail(ErrorKind::argument, "batch size must be >= 2 (batch norm)");
  if (!(cfg.validation_fraction > 0.0 && cfg.validation_fraction < 1.0)) {
    fail(ErrorKind::argument, "validation fraction must be strictly between 0 and 1");
  }
  if (cfg.checkpoint_every < 1) fail(ErrorKind::argument, "checkpoint-every must be >= 1");

  Corpus corpus = load_corpus(cfg.corpus_dir, cfg.quality, cfg.colorspace);
  int n = static_cast<int>(corpus.entries.size());
  if (n < 2) fail(ErrorKind::data, "corpus needs at least 2 images for a train/validation split");

  // Image-level split keeps validation contexts disjoint from training.
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::mt19937_64 split_rng(cfg.seed ^ 0x9e3779b97f4a7c15ull);
  for (int i = n - 1; i > 0; --i) {
    std::swap(order[i], order[bounded(split_rng, static_cast<std::uint64_t>(i) + 1)]);
  }
  int n_val = clamp(round_half_away(cfg.validation_fraction * n), 1, n - 1);
  std::vector<int> val_set(order.begin(), order.begin() + n_val);
  std::vector<int> train_set(order.begin() + n_val, order.end());
  std::sort(val_set.begin(), val_set.end());
  std::sort(train_set.begin(), train_set.end());

  ModelConfig mc;
  mc.variant = cfg.variant;
  mc.channels = cfg.channels;
  mc.n_res_blocks = cfg.n_res_blocks;
  mc.colorspace = cfg.colorspace;
  mc.seed = cfg.seed;
  Network net(mc);

  std::vector<Tensor*> params = net.trainable();
  AdamState opt = adam_init(params);
  AdamConfig oc;
  oc.lr = cfg.lr;
  oc.weight_decay = cfg.weight_decay;
  std::vector<bool> decay(params.size(), true);

  std::vector<TrainPair> val_pairs =
      sample_pairs(corpus, val_set, cfg.variant, cfg.seed ^ 0xda3e39cb94b95bdbull, kValPairs);

  std::mt19937_64 sampler(cfg.seed);
  TrainResult result;
  result.log_csv = "step,train_mse,val_mse,wallclock\n";
  bool have_first = false;
  double interval_sum = 0.0;
  long long interval_n = 0;
  auto t0 = std::chrono::steady_clock::now();

  for (long long step = 1; step <= cfg.iterations; ++step) {
    std::vector<TrainPair> batch;
    batch.reserve(static_cast<std::size_t>(cfg.batch_size));
    sample_into(corpus, train_set, cfg.variant, sampler, cfg.batch_size, batch);
    Tensor x, t;
    pairs_to_tensors(batch, cfg.variant, x, t);

    Tensor y = net.forward(x, /*train=*/true);
    Tensor grad;
    double loss = mse_loss(y, t, &grad);
    if (!std::isfinite(loss)) {
      fail(ErrorKind::internal, "training diverged: non-finite loss at step " +
                                    std::to_string(step) + " (lr=" + std::to_string(cfg.lr) + ")");
    }
    std::vector<Tensor> grads = net.backward(grad);
    std::vector<const Tensor*> gptrs(grads.size());
    for (std::size_t i = 0; i < grads.size(); ++i) gptrs[i] = &grads[i];
    adam_step(opt, oc, params, gptrs, decay);

    interval_sum += loss;
    interval_n += 1;

    if (step % cfg.checkpoint_every == 0 || step == cfg.iterations) {
      double train_mse = interval_sum / static_cast<double>(interval_n);
      interval_sum = 0.0;
      interval_n = 0;
      double val_mse = eval_pairs(net, val_pairs, cfg.variant);
      double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      result.log_csv += format_row(step, train_mse, val_mse, wall);
      result.checkpoint = save_checkpoint(net);
      if (!have_first) {
        result.first_train_mse = train_mse;
        have_first = true;
      }
      result.last_train_mse = train_mse;
      if (progress) progress(step, result.checkpoint, train_mse, val_mse);
    }
  }
  return result;
}

}  // namespace bcn
