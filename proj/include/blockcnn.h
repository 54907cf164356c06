/* Public C interface to the block codec, the block networks and the
 * evaluation tooling. All functions return a status code; on failure,
 * bcn_last_error() gives a thread-local description. Every object handed
 * out through an out-parameter is owned by the caller and released with
 * the matching *_free function. */
#ifndef BLOCKCNN_H
#define BLOCKCNN_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bcn_status {
  BCN_OK = 0,
  BCN_E_ARGUMENT = 1, /* bad parameter */
  BCN_E_IO = 2,       /* filesystem trouble */
  BCN_E_PARSE = 3,    /* malformed input file */
  BCN_E_FORMAT = 4,   /* container / bitstream / checkpoint violation */
  BCN_E_MODEL = 5,    /* wrong or missing model */
  BCN_E_DATA = 6,     /* unusable corpus */
  BCN_E_STATE = 7,    /* call out of sequence */
  BCN_E_INTERNAL = 8, /* invariant violation */
  BCN_E_NOMEM = 9
} bcn_status;

/* Colorspace codes: 1 = YCbCr, 2 = Lab (0 = RGB where meaningful). */
#define BCN_CS_RGB 0
#define BCN_CS_YCBCR 1
#define BCN_CS_LAB 2

/* Model variants. */
#define BCN_VARIANT_AR 0
#define BCN_VARIANT_PRED 1

typedef struct bcn_image bcn_image;   /* RGB raster image */
typedef struct bcn_model bcn_model;   /* loaded network checkpoint */
typedef struct bcn_buffer bcn_buffer; /* byte buffer */

/* Description of the most recent failure on this thread. */
const char* bcn_last_error(void);
const char* bcn_status_name(bcn_status status);

/* Caps worker threads for the whole library; 0 restores the default
 * (BLOCKCNN_THREADS environment variable, else hardware concurrency).
 * Results never depend on the thread count. */
void bcn_set_threads(int n);

/* --- images ------------------------------------------------------- */
bcn_status bcn_image_load_ppm(const char* path, bcn_image** out);
bcn_status bcn_image_save_ppm(const bcn_image* img, const char* path);
/* Interleaved 8-bit RGB rows, top to bottom. to_rgb8 needs 3*w*h bytes. */
bcn_status bcn_image_from_rgb8(const uint8_t* rgb, int width, int height, bcn_image** out);
bcn_status bcn_image_to_rgb8(const bcn_image* img, uint8_t* dst, size_t dst_size);
int bcn_image_width(const bcn_image* img);
int bcn_image_height(const bcn_image* img);
void bcn_image_free(bcn_image* img);

/* --- byte buffers -------------------------------------------------- */
const uint8_t* bcn_buffer_data(const bcn_buffer* buf);
size_t bcn_buffer_size(const bcn_buffer* buf);
void bcn_buffer_free(bcn_buffer* buf);

/* --- models -------------------------------------------------------- */
bcn_status bcn_model_load(const char* path, bcn_model** out);
/* Loads whichever checkpoint in `dir` (files ending in .bckp) hashes to
 * `id`; BCN_E_MODEL when none does. */
bcn_status bcn_model_find(const char* dir, uint64_t id, bcn_model** out);
int bcn_model_variant(const bcn_model* model); /* BCN_VARIANT_* */
uint64_t bcn_model_id(const bcn_model* model); /* checkpoint content hash */
/* Colorspace the model operates in (not stored in checkpoints; default
 * YCbCr). Accepts BCN_CS_YCBCR or BCN_CS_LAB. */
bcn_status bcn_model_set_colorspace(bcn_model* model, int colorspace);
void bcn_model_free(bcn_model* model);

/* --- codec --------------------------------------------------------- */
/* Compresses to the container format. `colorspace` is BCN_CS_YCBCR or
 * BCN_CS_LAB; `pred` turns the neighbour predictor on and must be a PRED
 * model (NULL = plain transform coding, bit-compatible with the baseline
 * JPEG path). */
bcn_status bcn_compress(const bcn_image* img, int quality, int colorspace, const bcn_model* pred,
                        bcn_buffer** out);
/* Reads the 23-byte container header. Any out-pointer may be NULL. */
bcn_status bcn_container_info(const uint8_t* data, size_t size, int* predictor_on,
                              uint64_t* model_id, int* colorspace, int* width, int* height,
                              int* quality);
/* `pred` must match the container's model id when the predictor is on. */
bcn_status bcn_decompress(const uint8_t* data, size_t size, const bcn_model* pred, bcn_image** out);

/* --- artifact removal ---------------------------------------------- */
/* Runs the AR network over every block. The image is converted into the
 * model's colorspace and back. */
bcn_status bcn_enhance(const bcn_image* img, const bcn_model* ar, bcn_image** out);

/* --- training ------------------------------------------------------ */
typedef struct bcn_train_options {
  int variant; /* BCN_VARIANT_* */
  const char* corpus_dir;
  int quality;
  long long iterations;
  int batch_size;
  float lr;
  float weight_decay;
  uint64_t seed;
  long long checkpoint_every;
  double validation_fraction;
  int channels;
  int n_res_blocks;
  int colorspace; /* BCN_CS_YCBCR or BCN_CS_LAB */
} bcn_train_options;

/* Paper defaults: lr 1e-3, weight decay 1e-4, batch 32, channels 64,
 * 9 residual blocks, quality 20, YCbCr. */
void bcn_train_options_init(bcn_train_options* opts);

/* Trains a model. The freshest checkpoint is written to checkpoint_path
 * at every logging point (every checkpoint_every steps and at the end).
 * log_csv (optional) receives the training log with columns
 * step,train_mse,val_mse,wallclock. */
bcn_status bcn_train(const bcn_train_options* opts, const char* checkpoint_path,
                     bcn_buffer** log_csv);

/* --- evaluation ----------------------------------------------------- */
/* Rate-distortion sweep over corpus x qualities x modes. `modes` is a
 * comma-separated subset of jpeg,jpeg+ar,bcnn,bcnn+ar. Model paths may be
 * NULL when no requested mode needs them. Result: CSV with columns
 * image,quality,mode,bpp,psnr,ssim. */
bcn_status bcn_eval(const char* corpus_dir, const int* qualities, int n_qualities,
                    const char* modes, const char* ar_path, const char* pred_path, int colorspace,
                    bcn_buffer** csv);

/* Per-position block error statistic at `quality`: an 8x8 grid of mean
 * squared luma errors as CSV (8 rows) plus a 256x256 PGM heat image.
 * Either out-pointer may be NULL. */
bcn_status bcn_block_stats(const char* corpus_dir, int quality, bcn_buffer** grid_csv,
                           bcn_buffer** heat_pgm);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* BLOCKCNN_H */
