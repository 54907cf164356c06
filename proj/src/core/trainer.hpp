#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "core/image.hpp"
#include "core/model.hpp"
#include "core/network.hpp"

namespace bcn {

struct TrainConfig {
  Variant variant = Variant::ar;
  std::string corpus_dir;
  int quality = 20;
  long long iterations = 1;
  int batch_size = 32;
  float lr = 1e-3f;
  float weight_decay = 1e-4f;
  std::uint64_t seed = 0;
  long long checkpoint_every = 500;
  double validation_fraction = 0.1;
  int channels = 64;
  int n_res_blocks = 9;
  Colorspace colorspace = Colorspace::ycbcr;
};

// Corpus images with their block-aligned clean and JPEG-degraded versions,
// all in the training colorspace. Entries are sorted by file name so the
// sampling stream is reproducible.
struct Corpus {
  struct Entry {
    std::string name;       // file name without directory
    ByteImage clean;        // padded to a block multiple
    ByteImage degraded;     // baseline round-trip of `clean`
  };
  std::vector<Entry> entries;
  int quality = 0;
  Colorspace colorspace = Colorspace::ycbcr;
};

Corpus load_corpus(const std::string& dir, int quality, Colorspace cs);

struct TrainPair {
  Context24 input;
  Block8 target;
};

// Uniform (image, block-position) draws from the listed corpus entries,
// fully determined by the seed. `subset` indexes corpus.entries.
std::vector<TrainPair> sample_pairs(const Corpus& corpus, const std::vector<int>& subset,
                                    Variant variant, std::uint64_t seed, int count);

struct TrainResult {
  std::vector<std::uint8_t> checkpoint;
  std::string log_csv;          // step,train_mse,val_mse,wallclock
  double first_train_mse = 0.0;
  double last_train_mse = 0.0;
};

// Called at every logging point with the freshest checkpoint bytes.
using TrainProgress =
    std::function<void(long long step, const std::vector<std::uint8_t>& checkpoint,
                       double train_mse, double val_mse)>;

// Full training loop: sample batch, forward, MSE, backward, Adam. The log
// gets a row every checkpoint_every steps and at the final step; train_mse
// is the mean batch loss since the previous row, val_mse the loss of a
// fixed held-out pair set evaluated with running BN statistics.
TrainResult train(const TrainConfig& cfg, const TrainProgress& progress = nullptr);

}  // namespace bcn
