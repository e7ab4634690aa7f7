// Copyright 2026 The memeanno Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MEMEANNO_MEMEANNO_H
#define MEMEANNO_MEMEANNO_H

#include <stddef.h>
#include <stdint.h>

#if defined(MEMEANNO_BUILDING_LIBRARY)
#define MA_API __attribute__((visibility("default")))
#else
#define MA_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Every fallible call returns a status. On failure the calling thread's last
 * error message is set and any out-pointer is left untouched. Strings returned
 * by accessors are owned by the handle and stay valid until the handle is
 * freed or the next call on it that documents otherwise. */
typedef enum ma_status {
  MA_OK = 0,
  MA_ERR_ARGUMENT = 1,   /* bad input from the caller */
  MA_ERR_SCHEMA = 2,     /* malformed data file */
  MA_ERR_IO = 3,         /* filesystem or socket failure */
  MA_ERR_CONFIG = 4,     /* agent configuration or environment */
  MA_ERR_TEMPLATE = 5,   /* prompt template */
  MA_ERR_PARSE = 6,      /* unparseable agent output */
  MA_ERR_DEGENERATE = 7, /* statistic undefined for the input */
  MA_ERR_INTERNAL = 8
} ma_status;

MA_API const char* ma_version(void);
MA_API const char* ma_status_name(ma_status status);
/* Message of the last failed call on this thread; "" when none. */
MA_API const char* ma_last_error(void);

/* ---- manifest ---------------------------------------------------------- */

typedef struct ma_manifest ma_manifest;

MA_API ma_status ma_manifest_load(const char* path, int check_images, ma_manifest** out);
MA_API size_t ma_manifest_size(const ma_manifest* manifest);
MA_API const char* ma_manifest_digest(const ma_manifest* manifest);
/* Stratified on the propaganda label; ratios must be positive and sum to 1. */
MA_API ma_status ma_manifest_split(ma_manifest* manifest, double train, double dev, double test,
                                   uint64_t seed);
MA_API ma_status ma_manifest_save(const ma_manifest* manifest, const char* path);
MA_API void ma_manifest_free(ma_manifest* manifest);

/* ---- reports ----------------------------------------------------------- */

/* A report is a JSON document with a "kind" field plus its rendered table. */
typedef struct ma_report ma_report;

MA_API ma_status ma_report_ingest(const ma_manifest* manifest, int images_checked, ma_report** out);
/* `fine_labels_path` may be NULL (fine counts then come from `labels_path`).
 * `crosstab_split` may be NULL for all splits. */
MA_API ma_status ma_report_stats(const ma_manifest* manifest, const char* labels_path,
                                 const char* fine_labels_path, const char* crosstab_split,
                                 ma_report** out);
/* Pairwise Cohen's kappa over `count` named label files, plus Fleiss' kappa
 * when three or more share an identical id set. `level` is one of coarse,
 * fine, fine-hateful, fine-not-hateful. */
MA_API ma_status ma_report_agreement(const char* const* names, const char* const* paths,
                                     size_t count, const char* level, ma_report** out);
MA_API ma_status ma_report_evaluation(const char* gold_path, const char* pred_path,
                                      const char* level, ma_report** out);
/* Re-renders a report previously produced by this library. */
MA_API ma_status ma_report_from_json(const char* json, ma_report** out);

MA_API const char* ma_report_json(const ma_report* report);
MA_API const char* ma_report_table(const ma_report* report);
MA_API size_t ma_report_warning_count(const ma_report* report);
MA_API const char* ma_report_warning(const ma_report* report, size_t index);
/* Non-zero when an agreement statistic in the report is undefined. */
MA_API int ma_report_degenerate(const ma_report* report);
MA_API void ma_report_free(ma_report* report);

/* ---- annotation runs --------------------------------------------------- */

typedef struct ma_run ma_run;

typedef enum ma_open_mode {
  MA_OPEN_CREATE = 0,   /* new run; fails if the directory holds one */
  MA_OPEN_RESUME = 1,   /* continue an existing run (or create it) */
  MA_OPEN_FORCE = 2,    /* restart, keeping the response cache */
  MA_OPEN_EXISTING = 3, /* read-only access for export and reports */
  MA_OPEN_CONTINUE = 4  /* existing run with agents; fails when absent */
} ma_open_mode;

typedef struct ma_run_options {
  const char* run_dir;
  const char* manifest_path;  /* NULL: the path recorded in the run */
  const char* agents_config;  /* required except for MA_OPEN_EXISTING */
  const char* split;          /* NULL: the recorded scope, or every meme */
  ma_open_mode mode;
  uint64_t jitter_seed;       /* retry backoff jitter */
} ma_run_options;

MA_API ma_status ma_run_open(const ma_run_options* options, ma_run** out);
MA_API const char* ma_run_id(const ma_run* run);
MA_API size_t ma_run_meme_count(const ma_run* run);

typedef void (*ma_progress_fn)(size_t completed, size_t total, void* user);

typedef struct ma_annotate_result {
  size_t memes;
  size_t tasks; /* (meme, agent) pairs invoked in this pass */
  size_t skipped;
  size_t cache_hits;
  size_t http_requests;
  size_t ok;
  size_t parse_failed;
  size_t transport_failed;
} ma_annotate_result;

/* `max_memes` 0 processes every meme in scope. */
MA_API ma_status ma_run_annotate(ma_run* run, size_t max_memes, int retry_failed,
                                 ma_progress_fn progress, void* user, ma_annotate_result* out);

typedef struct ma_consolidate_result {
  size_t memes;
  size_t pending; /* not fully annotated, left undecided */
  size_t unanimous;
  size_t consolidator_invocations;
  size_t llm_consolidator;
  size_t majority_fallback;
  size_t unresolved;
  size_t cache_hits;
  size_t http_requests;
} ma_consolidate_result;

/* `consolidator` NULL picks the single configured consolidator (none
 * configured: disagreements go to the majority fallback). Writes
 * labels.consolidated.jsonl in the run directory. */
MA_API ma_status ma_run_consolidate(ma_run* run, const char* consolidator, int consolidate_all,
                                    ma_progress_fn progress, void* user,
                                    ma_consolidate_result* out);

typedef struct ma_export_result {
  size_t exported;
  size_t unresolved;
} ma_export_result;

/* `source`: "consolidated", an agent name, "human" or "human:<annotator>".
 * Unresolved memes go to "<out_path>.unresolved.jsonl". Warnings are
 * available through ma_run_warning until the next call on the run. */
MA_API ma_status ma_run_export(ma_run* run, const char* source, const char* out_path,
                               ma_export_result* out);
/* Agreement between every agent in the run, the consolidated labels and any
 * human annotators. */
MA_API ma_status ma_run_agreement(ma_run* run, const char* level, ma_report** out);
MA_API size_t ma_run_warning_count(const ma_run* run);
MA_API const char* ma_run_warning(const ma_run* run, size_t index);
MA_API void ma_run_free(ma_run* run);

/* ---- review service ---------------------------------------------------- */

typedef struct ma_service ma_service;

typedef struct ma_service_options {
  const char* manifest_path;
  const char* run_dir;     /* may be NULL */
  const char* labels_path; /* NULL: the run's human label journal */
  const char* host;        /* NULL: 127.0.0.1 */
  int port;                /* 0: any free port */
  const char* cors_origin; /* NULL: "*" */
} ma_service_options;

MA_API ma_status ma_service_start(const ma_service_options* options, ma_service** out);
MA_API int ma_service_port(const ma_service* service);
/* Stops serving; safe to call from another thread than the one waiting. */
MA_API void ma_service_stop(ma_service* service);
MA_API void ma_service_free(ma_service* service);

#ifdef __cplusplus
}
#endif

#endif /* MEMEANNO_MEMEANNO_H */
