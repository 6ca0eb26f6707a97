/* Copyright 2026 The asdkit Authors.
 * SPDX-License-Identifier: Apache-2.0
 *
 * C interface of libasd. Every call returns an asd_status; on failure the
 * message is available from asd_last_error() on the same thread until the
 * next failing call. Handles are opaque and owned by the caller.
 *
 * Matrices cross the boundary column-major: a D x B batch is B contiguous
 * vectors of length D.
 */
#ifndef ASD_ASD_H_
#define ASD_ASD_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define ASD_API __declspec(dllexport)
#else
#define ASD_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum asd_status {
  ASD_OK = 0,
  ASD_ERR_FORMAT = 1,
  ASD_ERR_UNSUPPORTED_CHANNELS = 2,
  ASD_ERR_EMPTY_AUDIO = 3,
  ASD_ERR_TOO_SHORT = 4,
  ASD_ERR_CONFIG = 5,
  ASD_ERR_EMPTY_MANIFEST = 6,
  ASD_ERR_DUPLICATE = 7,
  ASD_ERR_NO_DATA = 8,
  ASD_ERR_INSUFFICIENT_DATA = 9,
  ASD_ERR_DIMENSION_MISMATCH = 10,
  ASD_ERR_UNDEFINED_METRIC = 11,
  ASD_ERR_NUMERICAL = 12,
  ASD_ERR_ARTIFACT_FORMAT = 13,
  ASD_ERR_VERSION_MISMATCH = 14,
  ASD_ERR_CORRUPT_ARTIFACT = 15,
  ASD_ERR_MISSING_ARTIFACT = 16,
  ASD_ERR_MISMATCH = 17,
  ASD_ERR_IO = 18,
  ASD_ERR_INVALID_ARGUMENT = 100,
  ASD_ERR_INTERNAL = 101
} asd_status;

ASD_API const char* asd_version(void);
ASD_API const char* asd_status_string(asd_status status);
/* Message of the last failing call on this thread; "" if none. */
ASD_API const char* asd_last_error(void);

/* ---- run configuration (features, model, training, scoring) ---- */

typedef struct asd_config asd_config;

ASD_API asd_status asd_config_default(asd_config** out);
/* key = value text file; ASD_ERR_CONFIG when missing or invalid. */
ASD_API asd_status asd_config_load(const char* path, asd_config** out);
/* Sets one key and revalidates; the config is unchanged on failure. */
ASD_API asd_status asd_config_set(asd_config* config, const char* key, const char* value);
ASD_API asd_status asd_config_write(const asd_config* config, const char* path);
ASD_API void asd_config_free(asd_config* config);
/* Stacked vectors K produced from a clip of `num_samples` under this config. */
ASD_API asd_status asd_config_vectors_per_clip(const asd_config* config, size_t num_samples,
                                               size_t* vectors);

/* ---- autoencoder ---- */

typedef struct asd_model asd_model;

ASD_API asd_status asd_model_create(const int* dims, size_t num_dims, uint64_t seed,
                                    asd_model** out);
ASD_API asd_status asd_model_load(const char* path, asd_model** out);
ASD_API asd_status asd_model_save(const asd_model* model, const char* path);
ASD_API void asd_model_free(asd_model* model);
/* Writes up to `capacity` layer widths; *count receives the total. */
ASD_API asd_status asd_model_dims(const asd_model* model, int* dims, size_t capacity,
                                  size_t* count);
ASD_API asd_status asd_model_macs(const asd_model* model, uint64_t* macs);
/* in and out are D x batch, column-major. */
ASD_API asd_status asd_model_forward(const asd_model* model, const float* in, size_t batch,
                                     float* out);
/* Multiply-accumulates of one forward pass through layers of these widths. */
ASD_API asd_status asd_macs_for_dims(const int* dims, size_t num_dims, uint64_t* macs);

/* Covariance file holding identity inverse matrices of size dim. */
ASD_API asd_status asd_write_identity_covariances(int dim, const char* path);

/* ---- data ---- */

/* Synthetic dataset; spec_path may be NULL for the defaults. */
ASD_API asd_status asd_synth_generate(const char* spec_path, uint64_t seed, const char* out_dir,
                                      size_t* num_clips);
/* Scans a dataset tree and writes its manifest CSV. */
ASD_API asd_status asd_scan_dataset(const char* root, const char* manifest_out,
                                    size_t* num_clips, size_t* num_skipped);

/* ---- train / score / evaluate ---- */

typedef struct asd_train_info {
  size_t source_clips;
  size_t target_clips;
  size_t vectors;
  size_t epochs;
  double final_loss;
  double mse_threshold;
  double mahala_threshold; /* NaN without covariances */
  int covariances_written;
} asd_train_info;

/* info may be NULL. Warnings go to stderr. */
ASD_API asd_status asd_train_machine(const asd_config* config, const char* data_root,
                                     const char* machine, const char* out_dir,
                                     asd_train_info* info);

typedef struct asd_score_request {
  const char* model_path;
  const char* covariance_path; /* NULL: beside the model */
  const char* data_root;
  const char* machine;
  const char* mode; /* "mse" or "mahala" */
  int has_threshold;
  double threshold; /* used when has_threshold != 0 */
  const char* out_csv;
} asd_score_request;

ASD_API asd_status asd_score_machine(const asd_score_request* request, size_t* num_scored,
                                     size_t* num_errors);

typedef struct asd_report asd_report;

/* reference_csv may be NULL; macs_per_vector 0 leaves the field out. */
ASD_API asd_status asd_evaluate(const char* scores_csv, const char* truth_manifest,
                                const char* reference_csv, const char* reference_mode,
                                uint64_t macs_per_vector, asd_report** out);
ASD_API double asd_report_official(const asd_report* report);
ASD_API int asd_report_zero_flag(const asd_report* report);
ASD_API int asd_report_complete(const asd_report* report);
ASD_API size_t asd_report_skipped_rows(const asd_report* report);
/* Strings stay valid until asd_report_free. */
ASD_API const char* asd_report_csv(const asd_report* report);
ASD_API const char* asd_report_table(const asd_report* report);
ASD_API const char* asd_report_summary(const asd_report* report);
ASD_API asd_status asd_report_write(const asd_report* report, const char* out_csv);
ASD_API void asd_report_free(asd_report* report);

/* ---- metric primitives ---- */

ASD_API asd_status asd_auc(const double* normals, size_t num_normals, const double* anomalies,
                           size_t num_anomalies, double* out);
ASD_API asd_status asd_pauc(const double* normals, size_t num_normals, const double* anomalies,
                            size_t num_anomalies, double max_fpr, double* out);
ASD_API asd_status asd_harmonic_mean(const double* values, size_t count, double* out,
                                     int* zero_flag);

#ifdef __cplusplus
}
#endif

#endif /* ASD_ASD_H_ */
