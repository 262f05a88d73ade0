/*
 * C interface to the color-polarization demosaicking library.
 *
 * All functions return a tcpd_rc status; out-parameters are written only on
 * TCPD_RC_OK. tcpd_last_error() returns a thread-local message describing
 * the most recent failure on the calling thread. Every handle obtained from
 * a *_create/*_load/*_run function must be released with the matching
 * *_destroy (or tcpd_string_free for returned strings).
 */
#ifndef TCPD_H
#define TCPD_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define TCPD_API __declspec(dllexport)
#else
#define TCPD_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tcpd_rc {
    TCPD_RC_OK = 0,
    TCPD_RC_INVALID_ARGUMENT = 1, /* bad handles, shapes, enums, config */
    TCPD_RC_DATA_ERROR = 2,       /* I/O and dataset failures */
    TCPD_RC_NUMERIC_ERROR = 3,    /* non-finite values in the pipeline */
    TCPD_RC_INTERNAL_ERROR = 4
} tcpd_rc;

TCPD_API const char* tcpd_version(void);
TCPD_API const char* tcpd_last_error(void);
TCPD_API void tcpd_string_free(char* s);

/* ---- CPFA pattern ---- */
typedef struct tcpd_pattern_t tcpd_pattern_t;

TCPD_API tcpd_rc tcpd_pattern_standard(tcpd_pattern_t** out);
TCPD_API tcpd_rc tcpd_pattern_from_json(const char* json_text, tcpd_pattern_t** out);
TCPD_API tcpd_rc tcpd_pattern_to_json(const tcpd_pattern_t* pattern, char** json_out);
TCPD_API void tcpd_pattern_destroy(tcpd_pattern_t* pattern);

/* ---- 12-channel ground-truth / reconstruction cubes ---- */
typedef struct tcpd_cube_t tcpd_cube_t;

TCPD_API tcpd_rc tcpd_cube_load_scene(const char* scene_dir, tcpd_cube_t** out);
TCPD_API tcpd_rc tcpd_cube_save_scene(const tcpd_cube_t* cube, const char* scene_dir);
TCPD_API tcpd_rc tcpd_cube_dims(const tcpd_cube_t* cube, int* height, int* width);
/* buffer holds 12*height*width doubles, channel-major
   [I0_R, I0_G, I0_B, I45_R, ..., I135_B] */
TCPD_API tcpd_rc tcpd_cube_read(const tcpd_cube_t* cube, double* buffer, size_t buffer_len);
TCPD_API tcpd_rc tcpd_cube_create(const double* buffer, int height, int width,
                                  tcpd_cube_t** out);
/* Writes s0.png (RGB), dop.png, aop.png (gray), aopdop.png (false color). */
TCPD_API tcpd_rc tcpd_cube_write_views(const tcpd_cube_t* cube, const char* out_dir,
                                       const char* prefix);
/* The four orientation images as 16-bit RGB PNGs (i000.png, ...). */
TCPD_API tcpd_rc tcpd_cube_write_orientation_pngs(const tcpd_cube_t* cube, const char* out_dir,
                                                  const char* prefix);
TCPD_API void tcpd_cube_destroy(tcpd_cube_t* cube);

/* ---- CPFA raw frames ---- */
typedef struct tcpd_raw_t tcpd_raw_t;

TCPD_API tcpd_rc tcpd_raw_synthesize(const tcpd_cube_t* cube, const tcpd_pattern_t* pattern,
                                     tcpd_raw_t** out);
TCPD_API tcpd_rc tcpd_raw_load(const char* png_path, const char* sidecar_path, tcpd_raw_t** out);
TCPD_API tcpd_rc tcpd_raw_save(const tcpd_raw_t* raw, const char* png_path,
                               const char* sidecar_path);
TCPD_API tcpd_rc tcpd_raw_dims(const tcpd_raw_t* raw, int* height, int* width);
TCPD_API tcpd_rc tcpd_raw_read(const tcpd_raw_t* raw, double* buffer, size_t buffer_len);
TCPD_API void tcpd_raw_destroy(tcpd_raw_t* raw);

/* ---- models ---- */
typedef struct tcpd_model_t tcpd_model_t;

TCPD_API tcpd_rc tcpd_model_load(const char* checkpoint_path, tcpd_model_t** out);
/* kind: "two_step" | "single_step"; arch_json may be NULL for defaults. */
TCPD_API tcpd_rc tcpd_model_create(const char* kind, const char* arch_json,
                                   const tcpd_pattern_t* pattern, uint64_t seed,
                                   tcpd_model_t** out);
TCPD_API tcpd_rc tcpd_model_save(const tcpd_model_t* model, const char* checkpoint_path);
TCPD_API tcpd_rc tcpd_model_kind(const tcpd_model_t* model, char** kind_out);
TCPD_API void tcpd_model_destroy(tcpd_model_t* model);

/* ---- demosaicking ----
   method: "bilinear" (model may be NULL), "tcpdnet" or "single_step"
   (model required and of the matching kind). Output values are clamped
   to [0,1] only when written to PNG, not in the returned cube. */
TCPD_API tcpd_rc tcpd_demosaick(const tcpd_raw_t* raw, const char* method,
                                const tcpd_model_t* model, tcpd_cube_t** out);

/* ---- training ----
   config_json follows the documented TrainConfig schema. Scenes are read
   from dataset_root; checkpoints and train_log.jsonl land in out_dir.
   summary_json_out (optional) receives {"final_checkpoint", "best_checkpoint",
   "best_val_s0_cpsnr", "best_iteration"}. */
TCPD_API tcpd_rc tcpd_train(const char* config_json, const char* dataset_root,
                            const char* out_dir, char** summary_json_out);

/* ---- evaluation ----
   methods_json: [{"name": ..., "checkpoint": ... | null}, ...] (null/missing
   checkpoint means the bilinear baseline). Writes report.csv/report.json
   (plus per-scene images when emit_images) under out_dir and returns the
   JSON report text. split: "test", "val", "train" or "all". */
TCPD_API tcpd_rc tcpd_evaluate(const char* methods_json, const char* dataset_root,
                               const char* split, const char* out_dir, int emit_images,
                               char** report_json_out);

/* Metrics of a single prediction against ground truth (JSON record). */
TCPD_API tcpd_rc tcpd_metrics(const tcpd_cube_t* pred, const tcpd_cube_t* truth,
                              char** metrics_json_out);

/* ---- synthetic data ---- */
TCPD_API tcpd_rc tcpd_generate_dataset(const char* root, int n_scenes, int height, int width,
                                       uint64_t seed);

#ifdef __cplusplus
}
#endif

#endif /* TCPD_H */
