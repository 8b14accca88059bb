/* odmtc — multi-view convolutional feature extraction with analytically
 * solved discriminant-correlation filter banks.
 *
 * C API of the shared library. All functions return a status code; on
 * failure odmtc_last_error() gives a human-readable message for the
 * calling thread. Objects are opaque handles released with the matching
 * *_close() call. Handles are not thread-safe for concurrent mutation,
 * but distinct handles may be used from distinct threads.
 */
#ifndef ODMTC_H
#define ODMTC_H

#include <stdint.h>

#ifndef ODMTC_API
#if defined(_WIN32)
#define ODMTC_API __declspec(dllexport)
#else
#define ODMTC_API __attribute__((visibility("default")))
#endif
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum odmtc_status {
    ODMTC_OK = 0,
    ODMTC_ERR_IO = 1,       /* unreadable/corrupt file, bad path          */
    ODMTC_ERR_CONFIG = 2,   /* invalid or unknown configuration           */
    ODMTC_ERR_ARGUMENT = 3, /* bad call arguments (null handle, range)    */
    ODMTC_ERR_DATA = 4,     /* dataset violates a precondition            */
    ODMTC_ERR_NUMERIC = 5,  /* factorization / solver failure             */
    ODMTC_ERR_INTERNAL = 6
} odmtc_status;

typedef struct odmtc_config odmtc_config;
typedef struct odmtc_dataset odmtc_dataset;
typedef struct odmtc_model odmtc_model;
typedef struct odmtc_eval odmtc_eval;

typedef struct odmtc_dataset_info {
    int32_t sample_count;
    int32_t class_count;
    int32_t image_rows;
    int32_t image_cols;
} odmtc_dataset_info;

ODMTC_API const char *odmtc_version(void);
ODMTC_API const char *odmtc_status_name(odmtc_status s);
/* Message describing the most recent failure on this thread. */
ODMTC_API const char *odmtc_last_error(void);

/* ---- configuration ---------------------------------------------------- */
ODMTC_API odmtc_status odmtc_config_open(const char *path, odmtc_config **out);
ODMTC_API odmtc_status odmtc_config_from_json(const char *json_text, odmtc_config **out);
/* Canonical JSON dump; parse(dump(c)) == c. Free with odmtc_string_free. */
ODMTC_API odmtc_status odmtc_config_to_json(const odmtc_config *cfg, char **out_text);
ODMTC_API odmtc_status odmtc_config_set_seed(odmtc_config *cfg, uint64_t seed);
ODMTC_API odmtc_status odmtc_config_set_threads(odmtc_config *cfg, int32_t threads);
/* Replace the per-layer filter counts (layer count must stay the same
 * unless uniform == 1, in which case every layer gets `filters[0]`). */
ODMTC_API odmtc_status odmtc_config_set_filters(odmtc_config *cfg, const int32_t *filters,
                                                int32_t count, int32_t uniform);
ODMTC_API void odmtc_config_close(odmtc_config *cfg);
ODMTC_API void odmtc_string_free(char *s);

/* ---- dataset ----------------------------------------------------------- */
/* Load images / feature files and generate the second view as configured. */
ODMTC_API odmtc_status odmtc_dataset_open(const odmtc_config *cfg, odmtc_dataset **out);
ODMTC_API odmtc_status odmtc_dataset_get_info(const odmtc_dataset *ds, odmtc_dataset_info *out);
ODMTC_API odmtc_status odmtc_dataset_label(const odmtc_dataset *ds, int32_t index, int32_t *out);
ODMTC_API void odmtc_dataset_close(odmtc_dataset *ds);

/* Train/test indices for one repetition of the configured split.
 * role: 0 = train, 1 = test. Free the buffer with odmtc_buffer_free. */
ODMTC_API odmtc_status odmtc_split_indices(const odmtc_config *cfg, const odmtc_dataset *ds,
                                           int32_t repetition, int32_t role,
                                           int32_t **out_indices, int32_t *out_count);

/* ---- training and models ---------------------------------------------- */
/* Fit filter banks + classifier on repetition 0 of the configured split
 * (or on the explicit index split / all samples, as configured).
 * log_path may be NULL; when given, a per-layer training log is written. */
ODMTC_API odmtc_status odmtc_train(const odmtc_config *cfg, const odmtc_dataset *ds,
                                   const char *log_path, odmtc_model **out);
ODMTC_API odmtc_status odmtc_model_save(const odmtc_model *m, const char *path);
ODMTC_API odmtc_status odmtc_model_open(const char *path, odmtc_model **out);
/* Human-readable description: geometry, per-layer eigenvalue spectra,
 * effective ranks, descriptor dimensions. Free with odmtc_string_free. */
ODMTC_API odmtc_status odmtc_model_describe(const odmtc_model *m, char **out_text);
ODMTC_API odmtc_status odmtc_model_descriptor_dim(const odmtc_model *m, int64_t *out_dim);
ODMTC_API void odmtc_model_close(odmtc_model *m);

/* Predict class labels for the given samples with the model's stored
 * classifier. Free out_labels with odmtc_buffer_free. */
ODMTC_API odmtc_status odmtc_predict(const odmtc_model *m, const odmtc_dataset *ds,
                                     const int32_t *indices, int32_t count,
                                     int32_t **out_labels);

/* ---- feature extraction ------------------------------------------------ */
/* Fused descriptors, row-major `count x dim`, one row per requested sample.
 * Free out_data with odmtc_buffer_free. */
ODMTC_API odmtc_status odmtc_extract(const odmtc_model *m, const odmtc_dataset *ds,
                                     const int32_t *indices, int32_t count,
                                     float **out_data, int64_t *out_dim);
ODMTC_API void odmtc_buffer_free(void *p);

/* ---- evaluation -------------------------------------------------------- */
/* Run the full protocol: for every repetition fit on the train split,
 * extract descriptors, train the classifier, score the test split.
 * out_dir may be NULL; when given, results.csv / splits.csv / summary.txt
 * are written there. */
ODMTC_API odmtc_status odmtc_evaluate(const odmtc_config *cfg, const odmtc_dataset *ds,
                                      const char *out_dir, odmtc_eval **out);
ODMTC_API int32_t odmtc_eval_split_count(const odmtc_eval *e);
ODMTC_API double odmtc_eval_accuracy(const odmtc_eval *e, int32_t split);
ODMTC_API double odmtc_eval_mean(const odmtc_eval *e);
ODMTC_API double odmtc_eval_stddev(const odmtc_eval *e);
ODMTC_API void odmtc_eval_close(odmtc_eval *e);

/* Evaluate across filter counts; writes sweep.csv and sweep_summary.txt
 * into out_dir. Each value of l_values is applied uniformly to all layers. */
ODMTC_API odmtc_status odmtc_sweep_filters(const odmtc_config *cfg, const odmtc_dataset *ds,
                                           const int32_t *l_values, int32_t count,
                                           const char *out_dir);

#ifdef __cplusplus
}
#endif

#endif /* ODMTC_H */
