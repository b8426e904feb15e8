/* SPDX-License-Identifier: Apache-2.0
 * Copyright 2026 The tracelab Authors
 *
 * C interface to the tracelab library. Every function returns a tl_status;
 * on failure tl_last_error() describes the problem for the calling thread.
 * Handles are opaque and must be released with the matching *_free call.
 * Strings returned through out-parameters stay valid until the owning handle
 * is modified or freed. */

#ifndef TRACELAB_H
#define TRACELAB_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define TL_API __declspec(dllexport)
#else
#define TL_API __attribute__((visibility("default")))
#endif

typedef enum tl_status {
  TL_OK = 0,
  TL_ERR_INVALID_ARGUMENT = 1,
  TL_ERR_LOAD = 2,
  TL_ERR_VALIDATION = 3,
  TL_ERR_NOT_FOUND = 4,
  TL_ERR_IO = 5,
  TL_ERR_VERSION_MISMATCH = 6,
  TL_ERR_INCOMPATIBLE = 7,
  TL_ERR_INTERNAL = 99
} tl_status;

typedef struct tl_config tl_config;
typedef struct tl_dataset tl_dataset;
typedef struct tl_matrix tl_matrix;

TL_API const char* tl_version(void);
/* Message of the last failed call on this thread; "" after a success. */
TL_API const char* tl_last_error(void);
TL_API const char* tl_status_name(tl_status status);

/* Flat key=value configuration. */
TL_API tl_status tl_config_new(tl_config** out);
TL_API void tl_config_free(tl_config* config);
/* Merges a key=value file; later values override earlier ones. */
TL_API tl_status tl_config_load(tl_config* config, const char* path);
TL_API tl_status tl_config_set(tl_config* config, const char* key, const char* value);
/* *value is NULL when the key is unset. */
TL_API tl_status tl_config_get(const tl_config* config, const char* key, const char** value);
/* Sorted key=value lines. */
TL_API tl_status tl_config_text(const tl_config* config, const char** text);

/* format: "coest_dir" or "csv_pair". */
TL_API tl_status tl_dataset_load(const char* root, const char* format, tl_dataset** out);
TL_API void tl_dataset_free(tl_dataset* dataset);
TL_API tl_status tl_dataset_counts(const tl_dataset* dataset, size_t* sources,
                                   size_t* targets, size_t* answers);

/* Candidate links for the dataset under the config's recovery settings. */
TL_API tl_status tl_recover(const tl_dataset* dataset, const tl_config* config,
                            tl_matrix** out);
TL_API tl_status tl_matrix_load(const char* path, tl_matrix** out);
TL_API void tl_matrix_free(tl_matrix* matrix);
TL_API tl_status tl_matrix_size(const tl_matrix* matrix, size_t* size);
/* Link i in (source, target) order; *score is -1 when the link has none. */
TL_API tl_status tl_matrix_link(const tl_matrix* matrix, size_t i, const char** source_id,
                                const char** target_id, double* score);
TL_API tl_status tl_matrix_save(const tl_matrix* matrix, const char* path);

/* Commands. Each writes its outputs under the config's "out" directory and
 * sets *summary to a one-line description owned by the config handle. */
TL_API tl_status tl_run_recover(tl_config* config, const char** summary);
TL_API tl_status tl_run_eval(tl_config* config, const char** summary);
TL_API tl_status tl_run_maintain(tl_config* config, const char** summary);
TL_API tl_status tl_run_classify_types(tl_config* config, const char** summary);
TL_API tl_status tl_run_explain(tl_config* config, const char** summary);
/* Blocks while serving the vetting HTTP API. */
TL_API tl_status tl_serve(const tl_config* config);

#ifdef __cplusplus
}
#endif

#endif /* TRACELAB_H */
