// C ABI over the C++ core: opaque handles, status codes, thread-local
// error text. Exceptions never cross this boundary.
#include "blockcnn.h"

#include <cstring>
#include <filesystem>
#include <new>
#include <optional>
#include <string>

#include "core/codec.hpp"
#include "core/enhance.hpp"
#include "core/io.hpp"
#include "core/metrics.hpp"
#include "core/threading.hpp"
#include "core/trainer.hpp"

namespace {

thread_local std::string g_last_error;

bcn_status status_of(bcn::ErrorKind kind) {
  switch (kind) {
    case bcn::ErrorKind::argument: return BCN_E_ARGUMENT;
    case bcn::ErrorKind::io: return BCN_E_IO;
    case bcn::ErrorKind::parse: return BCN_E_PARSE;
    case bcn::ErrorKind::format: return BCN_E_FORMAT;
    case bcn::ErrorKind::model: return BCN_E_MODEL;
    case bcn::ErrorKind::data: return BCN_E_DATA;
    case bcn::ErrorKind::state: return BCN_E_STATE;
    case bcn::ErrorKind::internal: return BCN_E_INTERNAL;
  }
  return BCN_E_INTERNAL;
}

template <typename Fn>
bcn_status guarded(Fn&& fn) {
  try {
    fn();
    return BCN_OK;
  } catch (const bcn::Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return BCN_E_NOMEM;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return BCN_E_INTERNAL;
  }
}

bcn_status fail_arg(const char* msg) {
  g_last_error = msg;
  return BCN_E_ARGUMENT;
}

bcn::Colorspace colorspace_of(int code) {
  switch (code) {
    case BCN_CS_RGB: return bcn::Colorspace::rgb;
    case BCN_CS_YCBCR: return bcn::Colorspace::ycbcr;
    case BCN_CS_LAB: return bcn::Colorspace::lab;
  }
  bcn::fail(bcn::ErrorKind::argument, "unknown colorspace code " + std::to_string(code));
}

}  // namespace

struct bcn_image {
  bcn::RasterImage img;  // always RGB at this boundary
};

struct bcn_model {
  bcn::Model model;
};

struct bcn_buffer {
  std::vector<std::uint8_t> bytes;
};

extern "C" {

const char* bcn_last_error(void) { return g_last_error.c_str(); }

const char* bcn_status_name(bcn_status status) {
  switch (status) {
    case BCN_OK: return "ok";
    case BCN_E_ARGUMENT: return "argument";
    case BCN_E_IO: return "io";
    case BCN_E_PARSE: return "parse";
    case BCN_E_FORMAT: return "format";
    case BCN_E_MODEL: return "model";
    case BCN_E_DATA: return "data";
    case BCN_E_STATE: return "state";
    case BCN_E_INTERNAL: return "internal";
    case BCN_E_NOMEM: return "nomem";
  }
  return "unknown";
}

void bcn_set_threads(int n) { bcn::set_thread_count(n); }

bcn_status bcn_image_load_ppm(const char* path, bcn_image** out) {
  if (!path || !out) return fail_arg("null argument");
  return guarded([&] { *out = new bcn_image{bcn::load_ppm_file(path)}; });
}

bcn_status bcn_image_save_ppm(const bcn_image* img, const char* path) {
  if (!img || !path) return fail_arg("null argument");
  return guarded([&] { bcn::save_ppm_file(img->img, path); });
}

bcn_status bcn_image_from_rgb8(const uint8_t* rgb, int width, int height, bcn_image** out) {
  if (!rgb || !out) return fail_arg("null argument");
  return guarded([&] {
    if (width < 1 || height < 1) bcn::fail(bcn::ErrorKind::argument, "dims must be positive");
    bcn::RasterImage img(width, height, bcn::Colorspace::rgb);
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        const uint8_t* px = rgb + (static_cast<std::size_t>(y) * width + x) * 3;
        for (int p = 0; p < 3; ++p) img.at(p, x, y) = static_cast<float>(px[p]) / 255.0f;
      }
    }
    *out = new bcn_image{std::move(img)};
  });
}

bcn_status bcn_image_to_rgb8(const bcn_image* img, uint8_t* dst, size_t dst_size) {
  if (!img || !dst) return fail_arg("null argument");
  return guarded([&] {
    const bcn::RasterImage& im = img->img;
    std::size_t need = static_cast<std::size_t>(im.width) * im.height * 3;
    if (dst_size < need) bcn::fail(bcn::ErrorKind::argument, "destination buffer too small");
    bcn::ByteImage bytes = bcn::quantize_image(im);
    for (int y = 0; y < im.height; ++y) {
      for (int x = 0; x < im.width; ++x) {
        uint8_t* px = dst + (static_cast<std::size_t>(y) * im.width + x) * 3;
        for (int p = 0; p < 3; ++p) px[p] = bytes.at(p, x, y);
      }
    }
  });
}

int bcn_image_width(const bcn_image* img) { return img ? img->img.width : 0; }
int bcn_image_height(const bcn_image* img) { return img ? img->img.height : 0; }
void bcn_image_free(bcn_image* img) { delete img; }

const uint8_t* bcn_buffer_data(const bcn_buffer* buf) { return buf ? buf->bytes.data() : nullptr; }
size_t bcn_buffer_size(const bcn_buffer* buf) { return buf ? buf->bytes.size() : 0; }
void bcn_buffer_free(bcn_buffer* buf) { delete buf; }

bcn_status bcn_model_load(const char* path, bcn_model** out) {
  if (!path || !out) return fail_arg("null argument");
  return guarded([&] { *out = new bcn_model{bcn::load_model_file(path)}; });
}

bcn_status bcn_model_find(const char* dir, uint64_t id, bcn_model** out) {
  if (!dir || !out) return fail_arg("null argument");
  return guarded([&] {
    namespace fs = std::filesystem;
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) {
      bcn::fail(bcn::ErrorKind::io, std::string("model directory not found: ") + dir);
    }
    std::vector<std::string> names;
    for (const fs::directory_entry& de : fs::directory_iterator(dir)) {
      if (de.is_regular_file() && de.path().extension() == ".bckp") {
        names.push_back(de.path().string());
      }
    }
    std::sort(names.begin(), names.end());
    for (const std::string& path : names) {
      std::vector<std::uint8_t> bytes = bcn::read_binary_file(path);
      if (bcn::checkpoint_id(bytes) == id) {
        *out = new bcn_model{bcn::load_model_bytes(bytes)};
        return;
      }
    }
    bcn::fail(bcn::ErrorKind::model,
              "no checkpoint in " + std::string(dir) + " has id " + std::to_string(id));
  });
}

int bcn_model_variant(const bcn_model* model) {
  if (!model) return -1;
  return model->model.net.config().variant == bcn::Variant::ar ? BCN_VARIANT_AR : BCN_VARIANT_PRED;
}

uint64_t bcn_model_id(const bcn_model* model) { return model ? model->model.id : 0; }

bcn_status bcn_model_set_colorspace(bcn_model* model, int colorspace) {
  if (!model) return fail_arg("null argument");
  return guarded([&] {
    bcn::Colorspace cs = colorspace_of(colorspace);
    if (cs == bcn::Colorspace::rgb) {
      bcn::fail(bcn::ErrorKind::argument, "models operate in YCbCr or Lab, not RGB");
    }
    model->model.net.set_colorspace(cs);
  });
}

void bcn_model_free(bcn_model* model) { delete model; }

bcn_status bcn_compress(const bcn_image* img, int quality, int colorspace, const bcn_model* pred,
                        bcn_buffer** out) {
  if (!img || !out) return fail_arg("null argument");
  return guarded([&] {
    bcn::Colorspace cs = colorspace_of(colorspace);
    *out = new bcn_buffer{
        bcn::encode_image(img->img, quality, cs, pred ? &pred->model : nullptr)};
  });
}

bcn_status bcn_container_info(const uint8_t* data, size_t size, int* predictor_on,
                              uint64_t* model_id, int* colorspace, int* width, int* height,
                              int* quality) {
  if (!data) return fail_arg("null argument");
  return guarded([&] {
    bcn::ContainerHeader h = bcn::parse_header(data, size);
    if (predictor_on) *predictor_on = h.predictor_on ? 1 : 0;
    if (model_id) *model_id = h.model_id;
    if (colorspace) *colorspace = h.colorspace == bcn::Colorspace::lab ? BCN_CS_LAB : BCN_CS_YCBCR;
    if (width) *width = static_cast<int>(h.width);
    if (height) *height = static_cast<int>(h.height);
    if (quality) *quality = h.quality;
  });
}

bcn_status bcn_decompress(const uint8_t* data, size_t size, const bcn_model* pred,
                          bcn_image** out) {
  if (!data || !out) return fail_arg("null argument");
  return guarded([&] {
    *out = new bcn_image{bcn::decode_image(data, size, pred ? &pred->model : nullptr)};
  });
}

bcn_status bcn_enhance(const bcn_image* img, const bcn_model* ar, bcn_image** out) {
  if (!img || !ar || !out) return fail_arg("null argument");
  return guarded([&] {
    // Eval-mode inference performs no writes to the network.
    bcn::Network& net = const_cast<bcn::Network&>(ar->model.net);
    *out = new bcn_image{bcn::enhance_image_rgb(img->img, net)};
  });
}

void bcn_train_options_init(bcn_train_options* opts) {
  if (!opts) return;
  opts->variant = BCN_VARIANT_AR;
  opts->corpus_dir = nullptr;
  opts->quality = 20;
  opts->iterations = 1000;
  opts->batch_size = 32;
  opts->lr = 1e-3f;
  opts->weight_decay = 1e-4f;
  opts->seed = 0;
  opts->checkpoint_every = 500;
  opts->validation_fraction = 0.1;
  opts->channels = 64;
  opts->n_res_blocks = 9;
  opts->colorspace = BCN_CS_YCBCR;
}

bcn_status bcn_train(const bcn_train_options* opts, const char* checkpoint_path,
                     bcn_buffer** log_csv) {
  if (!opts || !opts->corpus_dir || !checkpoint_path) return fail_arg("null argument");
  return guarded([&] {
    if (opts->variant != BCN_VARIANT_AR && opts->variant != BCN_VARIANT_PRED) {
      bcn::fail(bcn::ErrorKind::argument, "unknown variant code");
    }
    bcn::TrainConfig cfg;
    cfg.variant = opts->variant == BCN_VARIANT_AR ? bcn::Variant::ar : bcn::Variant::pred;
    cfg.corpus_dir = opts->corpus_dir;
    cfg.quality = opts->quality;
    cfg.iterations = opts->iterations;
    cfg.batch_size = opts->batch_size;
    cfg.lr = opts->lr;
    cfg.weight_decay = opts->weight_decay;
    cfg.seed = opts->seed;
    cfg.checkpoint_every = opts->checkpoint_every;
    cfg.validation_fraction = opts->validation_fraction;
    cfg.channels = opts->channels;
    cfg.n_res_blocks = opts->n_res_blocks;
    bcn::Colorspace cs = colorspace_of(opts->colorspace);
    if (cs == bcn::Colorspace::rgb) {
      bcn::fail(bcn::ErrorKind::argument, "training runs in YCbCr or Lab, not RGB");
    }
    cfg.colorspace = cs;

    std::string path = checkpoint_path;
    bcn::TrainResult result = bcn::train(
        cfg, [&](long long, const std::vector<std::uint8_t>& ckpt, double, double) {
          bcn::write_binary_file(path, ckpt);
        });
    if (log_csv) {
      *log_csv = new bcn_buffer{{result.log_csv.begin(), result.log_csv.end()}};
    }
  });
}

bcn_status bcn_eval(const char* corpus_dir, const int* qualities, int n_qualities,
                    const char* modes, const char* ar_path, const char* pred_path, int colorspace,
                    bcn_buffer** csv) {
  if (!corpus_dir || !qualities || !modes || !csv) return fail_arg("null argument");
  return guarded([&] {
    if (n_qualities < 1) bcn::fail(bcn::ErrorKind::argument, "need at least one quality");
    std::vector<int> qs(qualities, qualities + n_qualities);
    std::vector<bcn::EvalMode> ms;
    std::string token;
    std::string spec = modes;
    for (std::size_t i = 0; i <= spec.size(); ++i) {
      if (i == spec.size() || spec[i] == ',') {
        if (!token.empty()) ms.push_back(bcn::eval_mode_from_name(token));
        token.clear();
      } else {
        token += spec[i];
      }
    }
    bcn::Colorspace cs = colorspace_of(colorspace);
    if (cs == bcn::Colorspace::rgb) {
      bcn::fail(bcn::ErrorKind::argument, "evaluation runs in YCbCr or Lab, not RGB");
    }

    std::optional<bcn::Model> ar_model, pred_model;
    if (ar_path) {
      ar_model = bcn::load_model_file(ar_path);
      ar_model->net.set_colorspace(cs);
    }
    if (pred_path) {
      pred_model = bcn::load_model_file(pred_path);
      pred_model->net.set_colorspace(cs);
    }
    std::string out = bcn::records_to_csv(
        bcn::rd_sweep(corpus_dir, qs, ms, ar_model ? &*ar_model : nullptr,
                      pred_model ? &*pred_model : nullptr, cs));
    *csv = new bcn_buffer{{out.begin(), out.end()}};
  });
}

bcn_status bcn_block_stats(const char* corpus_dir, int quality, bcn_buffer** grid_csv,
                           bcn_buffer** heat_pgm) {
  if (!corpus_dir) return fail_arg("null argument");
  return guarded([&] {
    std::array<double, 64> grid = bcn::block_position_mse_dir(corpus_dir, quality);
    if (grid_csv) {
      std::string csv = bcn::grid_to_csv(grid);
      *grid_csv = new bcn_buffer{{csv.begin(), csv.end()}};
    }
    if (heat_pgm) *heat_pgm = new bcn_buffer{bcn::grid_to_pgm(grid)};
  });
}

}  // extern "C"
