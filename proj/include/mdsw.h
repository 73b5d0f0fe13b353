/* Copyright 2026 the mdsw authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C API of the registry-scan engine. All functions return a status code;
 * results come back as malloc'd JSON strings (release them with
 * mdsw_string_free) or through opaque handles. mdsw_last_error() describes
 * the most recent failure on the calling thread.
 */

#ifndef MDSW_H
#define MDSW_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define MDSW_API __declspec(dllexport)
#else
#define MDSW_API __attribute__((visibility("default")))
#endif

typedef enum mdsw_status {
  MDSW_OK = 0,
  MDSW_ERR_INVALID_ARG = 1,
  MDSW_ERR_SPEC = 2,        /* bad pipeline/schema/lexicon/recipe document */
  MDSW_ERR_ARCHIVE = 3,     /* unreadable or corrupt dataset archive */
  MDSW_ERR_HEADER = 4,      /* required column missing from a member header */
  MDSW_ERR_ENCODING = 5,    /* undecodable text under the chosen policy */
  MDSW_ERR_PARSE = 6,       /* malformed identifier or document */
  MDSW_ERR_IO = 7,
  MDSW_ERR_INTERNAL = 8
} mdsw_status;

MDSW_API const char* mdsw_version(void);

/* Message for the last failing call on this thread; empty string if none.
 * The pointer stays valid until the next failing call on the same thread. */
MDSW_API const char* mdsw_last_error(void);

MDSW_API void mdsw_string_free(char* s);

/* ------------------------------------------------------------ parsers */

/* Parses a UDI (GS1 element string, machine form with ASCII 29 as FNC1,
 * or an agency-prefixed DI). *json_out describes DI and PI fields. */
MDSW_API mdsw_status mdsw_udi_parse(const char* raw, char** json_out);

/* Decodes a registration certificate number. grammar_path may be NULL for
 * the builtin prefix table. */
MDSW_API mdsw_status mdsw_regnum_parse(const char* raw, const char* grammar_path,
                                       char** json_out);

/* ----------------------------------------------------------- pipeline */

typedef struct mdsw_pipeline mdsw_pipeline; /* opaque */

/* Compiles a pipeline spec document (JSON). Either argument may be NULL:
 * spec_path NULL selects the builtin two-layer strategy, lexicon_path NULL
 * the builtin keyword lexicon. */
MDSW_API mdsw_status mdsw_pipeline_compile(const char* spec_path, const char* lexicon_path,
                                           mdsw_pipeline** out);

MDSW_API mdsw_status mdsw_pipeline_compile_json(const char* spec_json,
                                                const char* lexicon_path, mdsw_pipeline** out);

MDSW_API void mdsw_pipeline_free(mdsw_pipeline* p);

MDSW_API mdsw_status mdsw_pipeline_stage_count(const mdsw_pipeline* p, size_t* out);

/* Stage name by index as a malloc'd string. */
MDSW_API mdsw_status mdsw_pipeline_stage_name(const mdsw_pipeline* p, size_t index,
                                              char** out);

/* Evaluates one record given as a JSON object of field -> text (fields:
 * product_name, generic_name, description, manufacturer, region,
 * classification_code, registration_number, record_id). Returns the member
 * stage names as a JSON array. */
MDSW_API mdsw_status mdsw_pipeline_eval_record(const mdsw_pipeline* p, const char* record_json,
                                               char** stages_json_out);

/* ----------------------------------------------------------------- scan */

typedef struct mdsw_scan_options {
  const char* dataset_path;       /* required */
  const char* pipeline_path;      /* NULL = builtin paper strategy */
  const char* schema_path;        /* NULL = builtin default */
  const char* keyword_lexicon;    /* NULL = builtin */
  const char* technique_lexicon;  /* NULL = builtin */
  const char* specialty_lexicon;  /* NULL = builtin */
  const char* function_lexicon;   /* NULL = builtin */
  const char* exclusions_path;    /* NULL = none */
  const char* sidecar_path;       /* NULL = none */
  const char* out_dir;            /* NULL = counts only, no files */
  const char* encoding;           /* "utf8" | "gbk" | "auto" (NULL = auto) */
  const char* delimiter;          /* single byte, NULL = "," */
  int workers;                    /* <= 0 = available parallelism */
  int dedup_by_di;                /* 0/1 */
} mdsw_scan_options;

/* Full run; *summary_json_out carries stage counts, totals, ingest stats
 * and audit counters. */
MDSW_API mdsw_status mdsw_scan(const mdsw_scan_options* options, char** summary_json_out);

/* --------------------------------------------------------------- synth */

/* Writes a synthetic dump-shaped archive plus its ground-truth answer key.
 * key_path NULL derives "<out_zip>.key.tsv". */
MDSW_API mdsw_status mdsw_synth(const char* recipe_path, const char* out_zip,
                                const char* key_path, char** summary_json_out);

/* -------------------------------------------------------------- verify */

/* Replays the dataset through the compiled matcher and the naive
 * per-record oracle (and the answer key when given); exact agreement
 * required for "pass": true. */
MDSW_API mdsw_status mdsw_verify(const mdsw_scan_options* options, const char* answer_key_path,
                                 char** report_json_out);

/* --------------------------------------------------------------- bench */

/* Synthesizes `rows` records under workdir and measures a full scan. */
MDSW_API mdsw_status mdsw_bench(uint64_t rows, const char* workdir, int workers,
                                char** report_json_out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* MDSW_H */
