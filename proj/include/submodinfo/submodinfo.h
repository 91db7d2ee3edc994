/* Copyright 2026 The Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to the submodular information measures library.
 *
 * Requests and results are JSON strings. Strings returned through `char**`
 * out-parameters are owned by the caller and released with smi_free_string.
 * On failure a function returns a nonzero status and the message is
 * available from smi_last_error_message (per thread).
 */

#ifndef SUBMODINFO_SUBMODINFO_H_
#define SUBMODINFO_SUBMODINFO_H_

#include <stddef.h>

#if defined(SUBMODINFO_BUILDING_LIBRARY)
#define SMI_EXPORT __attribute__((visibility("default")))
#else
#define SMI_EXPORT
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  SMI_OK = 0,
  SMI_ERROR_INVALID_ARGUMENT = 1,
  SMI_ERROR_UNKNOWN = 2,
  SMI_ERROR_FORMAT = 10,
  SMI_ERROR_LOOKUP = 11,
  SMI_ERROR_DEGENERATE = 12,
  SMI_ERROR_CONFIG = 13,
  SMI_ERROR_NUMERIC = 14,
  SMI_ERROR_UNSUPPORTED = 15,
  SMI_ERROR_SIZE = 16,
  SMI_ERROR_IO = 17
} smi_status;

typedef struct smi_collection smi_collection;

SMI_EXPORT const char* smi_version(void);
SMI_EXPORT const char* smi_last_error_message(void);
SMI_EXPORT const char* smi_status_name(smi_status status);
SMI_EXPORT void smi_free_string(char* s);

/* Collections: a ground set, queries, privates and reference summaries. */
SMI_EXPORT smi_status smi_collection_load(const char* path, smi_collection** out);
SMI_EXPORT smi_status smi_collection_parse(const char* json, smi_collection** out);
SMI_EXPORT void smi_collection_free(smi_collection* collection);
SMI_EXPORT smi_status smi_collection_size(const smi_collection* collection, size_t* out);
SMI_EXPORT smi_status smi_collection_to_json(const smi_collection* collection, char** out);

/* {"fn": "FL2MI:eta=0.2", "mode": "smi", "items": [...], "query": [...],
 *  "privates": [...]} -> measure value. */
SMI_EXPORT smi_status smi_measure(const smi_collection* collection, const char* request,
                                  double* value);

/* {"flavor": "query", "budget": 5, "fn": "...", "query": [...], ...}
 * -> selection JSON. */
SMI_EXPORT smi_status smi_summarize(const smi_collection* collection, const char* request,
                                    char** result);

/* {"summary": [...], "references": [[...], ...]} -> V-ROUGE report. */
SMI_EXPORT smi_status smi_evaluate(const smi_collection* collection, const char* request,
                                   char** result);

/* {"train_dir": "...", "task": "query", "epochs": 20, ...} -> model. */
SMI_EXPORT smi_status smi_learn(const char* request, char** result);

/* {"seed": 7, "study": "privacy", "sweep": "nu=0,1,10"} -> csv and report. */
SMI_EXPORT smi_status smi_synth(const char* request, char** result);

/* {"seed": N} -> suite report; *passed is 1 when every check passed. */
SMI_EXPORT smi_status smi_check_oracle(const char* request, char** result, int* passed);

/* Synthetic concept collections for learning experiments.
 * {"collections": 6, "items": 30, "seed": 11, ...} -> list of documents. */
SMI_EXPORT smi_status smi_generate_collections(const char* request, char** result);

#ifdef __cplusplus
}
#endif

#endif /* SUBMODINFO_SUBMODINFO_H_ */
