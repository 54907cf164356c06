// Command-line front end. Talks to the library exclusively through the C
// API. stdout carries only the paths of produced artifacts; everything
// else goes to stderr. Exit codes: 0 success, 1 usage, 2 data/format,
// 3 internal.
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "blockcnn.h"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInternal = 3;

int exit_code_of(bcn_status s) {
  switch (s) {
    case BCN_OK: return 0;
    case BCN_E_ARGUMENT: return kExitUsage;
    case BCN_E_IO:
    case BCN_E_PARSE:
    case BCN_E_FORMAT:
    case BCN_E_MODEL:
    case BCN_E_DATA: return kExitData;
    case BCN_E_STATE:
    case BCN_E_INTERNAL:
    case BCN_E_NOMEM: return kExitInternal;
  }
  return kExitInternal;
}

int report(bcn_status s) {
  std::fprintf(stderr, "error (%s): %s\n", bcn_status_name(s), bcn_last_error());
  return exit_code_of(s);
}

int report_usage(const std::string& msg) {
  std::fprintf(stderr, "error: %s\n", msg.c_str());
  return kExitUsage;
}

int report_data(const std::string& msg) {
  std::fprintf(stderr, "error: %s\n", msg.c_str());
  return kExitData;
}

struct ImageDeleter {
  void operator()(bcn_image* p) const { bcn_image_free(p); }
};
struct ModelDeleter {
  void operator()(bcn_model* p) const { bcn_model_free(p); }
};
struct BufferDeleter {
  void operator()(bcn_buffer* p) const { bcn_buffer_free(p); }
};
using ImagePtr = std::unique_ptr<bcn_image, ImageDeleter>;
using ModelPtr = std::unique_ptr<bcn_model, ModelDeleter>;
using BufferPtr = std::unique_ptr<bcn_buffer, BufferDeleter>;

bool read_file(const std::string& path, std::vector<std::uint8_t>& bytes) {
  std::ifstream f(path, std::ios::binary);
  if (!f) return false;
  f.seekg(0, std::ios::end);
  std::streamoff n = f.tellg();
  f.seekg(0, std::ios::beg);
  bytes.resize(static_cast<std::size_t>(n));
  if (n > 0) f.read(reinterpret_cast<char*>(bytes.data()), n);
  return static_cast<bool>(f);
}

bool write_file(const std::string& path, const std::uint8_t* data, std::size_t size) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) return false;
  f.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(size));
  return static_cast<bool>(f);
}

int colorspace_code(const std::string& name) {
  return name == "lab" ? BCN_CS_LAB : BCN_CS_YCBCR;
}

bool parse_int_list(const std::string& spec, std::vector<int>& out) {
  std::string token;
  for (std::size_t i = 0; i <= spec.size(); ++i) {
    if (i == spec.size() || spec[i] == ',') {
      if (token.empty()) return false;
      try {
        std::size_t used = 0;
        out.push_back(std::stoi(token, &used));
        if (used != token.size()) return false;
      } catch (...) {
        return false;
      }
      token.clear();
    } else {
      token += spec[i];
    }
  }
  return !out.empty();
}

std::string sibling_path(const std::string& path, const std::string& new_suffix) {
  std::size_t dot = path.find_last_of('.');
  std::size_t slash = path.find_last_of("/\\");
  bool has_ext = dot != std::string::npos && (slash == std::string::npos || dot > slash);
  return (has_ext ? path.substr(0, dot) : path) + new_suffix;
}

int run_compress(const std::string& in, const std::string& out, int quality,
                 const std::string& model_path, const std::string& colorspace) {
  ImagePtr img;
  {
    bcn_image* raw = nullptr;
    bcn_status s = bcn_image_load_ppm(in.c_str(), &raw);
    if (s != BCN_OK) return report(s);
    img.reset(raw);
  }
  ModelPtr model;
  if (!model_path.empty()) {
    bcn_model* raw = nullptr;
    bcn_status s = bcn_model_load(model_path.c_str(), &raw);
    if (s != BCN_OK) return report(s);
    model.reset(raw);
  }
  BufferPtr buf;
  {
    bcn_buffer* raw = nullptr;
    bcn_status s =
        bcn_compress(img.get(), quality, colorspace_code(colorspace), model.get(), &raw);
    if (s != BCN_OK) return report(s);
    buf.reset(raw);
  }
  if (!write_file(out, bcn_buffer_data(buf.get()), bcn_buffer_size(buf.get()))) {
    return report_data("cannot write " + out);
  }
  std::printf("%s\n", out.c_str());
  return 0;
}

int run_decompress(const std::string& in, const std::string& out, const std::string& model_dir) {
  std::vector<std::uint8_t> bytes;
  if (!read_file(in, bytes)) return report_data("cannot read " + in);
  int predictor_on = 0;
  std::uint64_t model_id = 0;
  {
    bcn_status s = bcn_container_info(bytes.data(), bytes.size(), &predictor_on, &model_id,
                                      nullptr, nullptr, nullptr, nullptr);
    if (s != BCN_OK) return report(s);
  }
  ModelPtr model;
  if (predictor_on) {
    if (model_dir.empty()) {
      return report_data("container needs model id " + std::to_string(model_id) +
                         "; pass --model-dir");
    }
    bcn_model* raw = nullptr;
    bcn_status s = bcn_model_find(model_dir.c_str(), model_id, &raw);
    if (s != BCN_OK) return report(s);
    model.reset(raw);
  }
  ImagePtr img;
  {
    bcn_image* raw = nullptr;
    bcn_status s = bcn_decompress(bytes.data(), bytes.size(), model.get(), &raw);
    if (s != BCN_OK) return report(s);
    img.reset(raw);
  }
  bcn_status s = bcn_image_save_ppm(img.get(), out.c_str());
  if (s != BCN_OK) return report(s);
  std::printf("%s\n", out.c_str());
  return 0;
}

int run_enhance(const std::string& in, const std::string& out, const std::string& model_path,
                int quality, const std::string& colorspace) {
  (void)quality;  // names the model's training point; checked by CLI11 range
  ImagePtr img;
  {
    bcn_image* raw = nullptr;
    bcn_status s = bcn_image_load_ppm(in.c_str(), &raw);
    if (s != BCN_OK) return report(s);
    img.reset(raw);
  }
  ModelPtr model;
  {
    bcn_model* raw = nullptr;
    bcn_status s = bcn_model_load(model_path.c_str(), &raw);
    if (s != BCN_OK) return report(s);
    model.reset(raw);
  }
  {
    bcn_status s = bcn_model_set_colorspace(model.get(), colorspace_code(colorspace));
    if (s != BCN_OK) return report(s);
  }
  ImagePtr result;
  {
    bcn_image* raw = nullptr;
    bcn_status s = bcn_enhance(img.get(), model.get(), &raw);
    if (s != BCN_OK) return report(s);
    result.reset(raw);
  }
  bcn_status s = bcn_image_save_ppm(result.get(), out.c_str());
  if (s != BCN_OK) return report(s);
  std::printf("%s\n", out.c_str());
  return 0;
}

int run_train(const bcn_train_options& opts, const std::string& out) {
  BufferPtr log;
  {
    bcn_buffer* raw = nullptr;
    bcn_status s = bcn_train(&opts, out.c_str(), &raw);
    if (s != BCN_OK) return report(s);
    log.reset(raw);
  }
  std::string log_path = sibling_path(out, ".log.csv");
  if (!write_file(log_path, bcn_buffer_data(log.get()), bcn_buffer_size(log.get()))) {
    return report_data("cannot write " + log_path);
  }
  std::printf("%s\n%s\n", out.c_str(), log_path.c_str());
  return 0;
}

int run_eval(const std::string& corpus, const std::string& qualities, const std::string& modes,
             const std::string& out, const std::string& ar_path, const std::string& pred_path,
             const std::string& colorspace) {
  std::vector<int> qs;
  if (!parse_int_list(qualities, qs)) {
    return report_usage("--qualities wants a comma-separated integer list, got '" + qualities + "'");
  }
  BufferPtr csv;
  {
    bcn_buffer* raw = nullptr;
    bcn_status s = bcn_eval(corpus.c_str(), qs.data(), static_cast<int>(qs.size()), modes.c_str(),
                            ar_path.empty() ? nullptr : ar_path.c_str(),
                            pred_path.empty() ? nullptr : pred_path.c_str(),
                            colorspace_code(colorspace), &raw);
    if (s != BCN_OK) return report(s);
    csv.reset(raw);
  }
  if (!write_file(out, bcn_buffer_data(csv.get()), bcn_buffer_size(csv.get()))) {
    return report_data("cannot write " + out);
  }
  std::printf("%s\n", out.c_str());
  return 0;
}

int run_stats(const std::string& corpus, int quality, const std::string& out) {
  BufferPtr grid, heat;
  {
    bcn_buffer *graw = nullptr, *hraw = nullptr;
    bcn_status s = bcn_block_stats(corpus.c_str(), quality, &graw, &hraw);
    if (s != BCN_OK) return report(s);
    grid.reset(graw);
    heat.reset(hraw);
  }
  if (!write_file(out, bcn_buffer_data(grid.get()), bcn_buffer_size(grid.get()))) {
    return report_data("cannot write " + out);
  }
  std::string heat_path = sibling_path(out, ".pgm");
  if (!write_file(heat_path, bcn_buffer_data(heat.get()), bcn_buffer_size(heat.get()))) {
    return report_data("cannot write " + heat_path);
  }
  std::printf("%s\n%s\n", out.c_str(), heat_path.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Block codec with learned prediction and artifact removal"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "Cap worker threads (default: BLOCKCNN_THREADS or all cores)");

  std::string in, out, model_path, model_dir, colorspace = "ycbcr";
  int quality = 0;

  CLI::App* compress = app.add_subcommand("compress", "Compress a PPM image into a container");
  compress->fallthrough();
  compress->add_option("--in", in, "Input PPM")->required();
  compress->add_option("--out", out, "Output container")->required();
  compress->add_option("--quality", quality, "Quality factor")->required()->check(CLI::Range(1, 100));
  compress->add_option("--model", model_path, "PRED checkpoint (enables the neighbour predictor)");
  compress->add_option("--colorspace", colorspace, "Coding colorspace")
      ->check(CLI::IsMember({"ycbcr", "lab"}));

  CLI::App* decompress = app.add_subcommand("decompress", "Decode a container back to PPM");
  decompress->fallthrough();
  decompress->add_option("--in", in, "Input container")->required();
  decompress->add_option("--out", out, "Output PPM")->required();
  decompress->add_option("--model-dir", model_dir, "Directory searched for the container's model");

  CLI::App* enhance = app.add_subcommand("enhance", "Run artifact removal over a decoded image");
  enhance->fallthrough();
  enhance->add_option("--in", in, "Input PPM")->required();
  enhance->add_option("--out", out, "Output PPM")->required();
  enhance->add_option("--model", model_path, "AR checkpoint")->required();
  enhance->add_option("--quality", quality, "Quality the model was trained for")
      ->required()
      ->check(CLI::Range(1, 100));
  enhance->add_option("--colorspace", colorspace, "Model colorspace")
      ->check(CLI::IsMember({"ycbcr", "lab"}));

  std::string variant, corpus;
  bcn_train_options topts;
  bcn_train_options_init(&topts);
  long long iters = 0;
  int batch = 32, channels = 64, res_blocks = 9;
  std::uint64_t seed = 0;
  long long ckpt_every = 500;
  double lr = 1e-3, wd = 1e-4, val_fraction = 0.1;

  CLI::App* train = app.add_subcommand("train", "Train an AR or PRED model");
  train->fallthrough();
  train->add_option("--variant", variant, "ar or pred")
      ->required()
      ->check(CLI::IsMember({"ar", "pred"}));
  train->add_option("--corpus", corpus, "Directory of PPM images")->required();
  train->add_option("--quality", quality, "Training quality factor")
      ->required()
      ->check(CLI::Range(1, 100));
  train->add_option("--iters", iters, "Training iterations")->required()->check(CLI::PositiveNumber);
  train->add_option("--out", out, "Checkpoint path")->required();
  train->add_option("--seed", seed, "Seed for init, split and sampling");
  train->add_option("--batch", batch, "Batch size")->check(CLI::Range(2, 4096));
  train->add_option("--channels", channels, "Network width")->check(CLI::Range(8, 4096));
  train->add_option("--res-blocks", res_blocks, "Residual block count")->check(CLI::Range(1, 1024));
  train->add_option("--lr", lr, "Learning rate");
  train->add_option("--wd", wd, "Weight decay");
  train->add_option("--checkpoint-every", ckpt_every, "Logging/checkpoint interval")
      ->check(CLI::PositiveNumber);
  train->add_option("--val-fraction", val_fraction, "Held-out image fraction");
  train->add_option("--colorspace", colorspace, "Training colorspace")
      ->check(CLI::IsMember({"ycbcr", "lab"}));

  std::string qualities, modes, ar_path, pred_path;
  CLI::App* eval = app.add_subcommand("eval", "Rate-distortion sweep to CSV");
  eval->fallthrough();
  eval->add_option("--corpus", corpus, "Directory of PPM images")->required();
  eval->add_option("--qualities", qualities, "Comma-separated quality factors")->required();
  eval->add_option("--modes", modes, "Comma-separated subset of jpeg,jpeg+ar,bcnn,bcnn+ar")
      ->required();
  eval->add_option("--out", out, "Output CSV")->required();
  eval->add_option("--ar", ar_path, "AR checkpoint for the +ar modes");
  eval->add_option("--pred", pred_path, "PRED checkpoint for the bcnn modes");
  eval->add_option("--colorspace", colorspace, "Pipeline colorspace")
      ->check(CLI::IsMember({"ycbcr", "lab"}));

  CLI::App* stats = app.add_subcommand("stats", "Within-block error position statistic");
  stats->fallthrough();
  stats->add_option("--corpus", corpus, "Directory of PPM images")->required();
  stats->add_option("--quality", quality, "Quality factor")->required()->check(CLI::Range(1, 100));
  stats->add_option("--out", out, "Output CSV (heat image lands beside it as .pgm)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // help goes to stdout by request, exit 0
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    std::fputs(app.help().c_str(), stderr);
    return kExitUsage;
  }

  if (threads != 0) bcn_set_threads(threads);

  if (compress->parsed()) return run_compress(in, out, quality, model_path, colorspace);
  if (decompress->parsed()) return run_decompress(in, out, model_dir);
  if (enhance->parsed()) return run_enhance(in, out, model_path, quality, colorspace);
  if (train->parsed()) {
    topts.variant = variant == "pred" ? BCN_VARIANT_PRED : BCN_VARIANT_AR;
    topts.corpus_dir = corpus.c_str();
    topts.quality = quality;
    topts.iterations = iters;
    topts.batch_size = batch;
    topts.lr = static_cast<float>(lr);
    topts.weight_decay = static_cast<float>(wd);
    topts.seed = seed;
    topts.checkpoint_every = ckpt_every;
    topts.validation_fraction = val_fraction;
    topts.channels = channels;
    topts.n_res_blocks = res_blocks;
    topts.colorspace = colorspace_code(colorspace);
    return run_train(topts, out);
  }
  if (eval->parsed()) return run_eval(corpus, qualities, modes, out, ar_path, pred_path, colorspace);
  if (stats->parsed()) return run_stats(corpus, quality, out);
  return kExitUsage;
}
