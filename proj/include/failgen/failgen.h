/* SPDX-License-Identifier: Apache-2.0 */
/*
 * C interface to the failgen library. Objects are opaque handles released
 * with their *_free function. Every call returns a failgen_status; on error a
 * thread-local message is available from failgen_last_error(). Strings
 * returned through char** are owned by the caller and released with
 * failgen_string_free().
 */
#ifndef FAILGEN_FAILGEN_H
#define FAILGEN_FAILGEN_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define FAILGEN_API __declspec(dllexport)
#else
#define FAILGEN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum failgen_status {
  FAILGEN_OK = 0,
  FAILGEN_E_INVALID_ARGUMENT = 1,
  FAILGEN_E_TRAJECTORY_TOO_SHORT = 2,
  FAILGEN_E_INVALID_SEGMENT_INDEX = 3,
  FAILGEN_E_UNKNOWN_OBJECT_ID = 4,
  FAILGEN_E_PLAN_MISMATCH = 5,
  FAILGEN_E_UNKNOWN_TASK = 6,
  FAILGEN_E_NOT_A_GRASP_KEYFRAME = 7,
  FAILGEN_E_NO_FOLLOWING_SEGMENT = 8,
  FAILGEN_E_ZERO_OFFSET = 9,
  FAILGEN_E_ZERO_ANGLE = 10,
  FAILGEN_E_FIRST_KEYFRAME = 11,
  FAILGEN_E_GROUPS_OVERLAP = 12,
  FAILGEN_E_UNORDERED_TASK = 13,
  FAILGEN_E_NO_ANCHORED_KEYFRAMES = 14,
  FAILGEN_E_INVALID_DISTRACTOR = 15,
  FAILGEN_E_EMPTY_GRID = 16,
  FAILGEN_E_SCHEMA = 17,
  FAILGEN_E_EMPTY_SUBTASK = 18,
  FAILGEN_E_PARAM_MISMATCH = 19,
  FAILGEN_E_DUPLICATE_ID = 20,
  FAILGEN_E_IO = 21,
  FAILGEN_E_MALFORMED_LINE = 22,
  FAILGEN_E_MALFORMED_DATASET = 23,
  FAILGEN_E_SUBTASK_OUT_OF_RANGE = 24,
  FAILGEN_E_UNKNOWN_RECORD_ID = 25,
  FAILGEN_E_JUDGE_UNAVAILABLE = 26,
  FAILGEN_E_MALFORMED_JUDGE_REPLY = 27,
  FAILGEN_E_INTERNAL = 28
} failgen_status;

typedef struct failgen_config failgen_config;
typedef struct failgen_perturbation failgen_perturbation;
typedef struct failgen_demo failgen_demo;
typedef struct failgen_evaluator failgen_evaluator;

FAILGEN_API const char* failgen_version(void);
FAILGEN_API const char* failgen_status_name(failgen_status status);
/* Message for the last failing call on this thread; "" when none. */
FAILGEN_API const char* failgen_last_error(void);
FAILGEN_API void failgen_string_free(char* str);

FAILGEN_API size_t failgen_task_count(void);
/* NULL when index is out of range. */
FAILGEN_API const char* failgen_task_name(size_t index);

/* ---- sweep configuration ------------------------------------------------ */

FAILGEN_API failgen_status failgen_config_default(failgen_config** out);
FAILGEN_API failgen_status failgen_config_parse(const char* yaml_text, failgen_config** out);
FAILGEN_API failgen_status failgen_config_load(const char* path, failgen_config** out);
FAILGEN_API failgen_status failgen_config_to_json(const failgen_config* config, char** out_json);
FAILGEN_API void failgen_config_free(failgen_config* config);

/* ---- dataset ------------------------------------------------------------ */

typedef struct failgen_generate_summary {
  size_t failure_count;
  size_t success_count;
  size_t image_count;
  char dataset_digest[65];
  char images_digest[65];
} failgen_generate_summary;

FAILGEN_API failgen_status failgen_generate(const failgen_config* config, const char* out_dir, unsigned jobs,
                                            int write_png, const char* command, failgen_generate_summary* out);

/* *out_ok is 1 when every record passed; *out_report_json lists problems. */
FAILGEN_API failgen_status failgen_validate(const char* dataset_dir, unsigned jobs, int* out_ok,
                                            char** out_report_json);

FAILGEN_API failgen_status failgen_stats(const char* dataset_dir, char** out_json);

/* ---- single demonstrations ---------------------------------------------- */

FAILGEN_API failgen_status failgen_perturbation_load(const char* path, failgen_perturbation** out);
FAILGEN_API failgen_status failgen_perturbation_parse(const char* yaml_text, failgen_perturbation** out);
/* Task named in the document, or NULL. */
FAILGEN_API const char* failgen_perturbation_task(const failgen_perturbation* p);
/* Returns 1 and stores the seed when the document names one. */
FAILGEN_API int failgen_perturbation_seed(const failgen_perturbation* p, uint64_t* out_seed);
FAILGEN_API void failgen_perturbation_free(failgen_perturbation* p);

/* `perturbation` may be NULL for the unperturbed demonstration. */
FAILGEN_API failgen_status failgen_demo_run(const char* task, uint64_t seed, const failgen_perturbation* perturbation,
                                            failgen_demo** out);
FAILGEN_API int failgen_demo_success(const failgen_demo* demo);
/* -1 when every checkpoint passes. */
FAILGEN_API int failgen_demo_first_failing(const failgen_demo* demo);
FAILGEN_API size_t failgen_demo_subtask_count(const failgen_demo* demo);
/* Valid until the demo is freed. */
FAILGEN_API const char* failgen_demo_summary(const failgen_demo* demo);
/* .ppm or .png by extension. */
FAILGEN_API failgen_status failgen_demo_write_image(const failgen_demo* demo, const char* path);
FAILGEN_API void failgen_demo_free(failgen_demo* demo);

/* ---- metrics ------------------------------------------------------------ */

FAILGEN_API failgen_status failgen_rouge_l(const char* candidate, const char* reference, double* out_precision,
                                           double* out_recall, double* out_f1);
FAILGEN_API failgen_status failgen_cosine(const char* candidate, const char* reference, double* out_score);

typedef enum failgen_binary { FAILGEN_BINARY_YES = 0, FAILGEN_BINARY_NO = 1, FAILGEN_BINARY_UNPARSEABLE = 2 } failgen_binary;
FAILGEN_API failgen_binary failgen_parse_binary(const char* response);

/*
 * Judge callback: write a NUL-terminated reply of at most reply_capacity
 * bytes into `reply` and return 0, or return non-zero for a transient
 * failure that should be retried.
 */
typedef int (*failgen_judge_fn)(void* user, const char* prompt, char* reply, size_t reply_capacity);

FAILGEN_API failgen_status failgen_evaluator_create(const char* metrics, failgen_evaluator** out);
FAILGEN_API failgen_status failgen_evaluator_set_judge(failgen_evaluator* ev, failgen_judge_fn fn, void* user);
/* Uses FAILGEN_JUDGE_ENDPOINT / _API_KEY / _MODEL. */
FAILGEN_API failgen_status failgen_evaluator_use_env_judge(failgen_evaluator* ev);
/* Uses FAILGEN_EMBED_ENDPOINT / _API_KEY / _MODEL for cosine when set. */
FAILGEN_API failgen_status failgen_evaluator_use_env_embedder(failgen_evaluator* ev, int* out_enabled);
FAILGEN_API failgen_status failgen_evaluator_set_judge_options(failgen_evaluator* ev, int max_retries,
                                                               unsigned initial_backoff_ms, unsigned concurrency,
                                                               unsigned timeout_ms);
FAILGEN_API failgen_status failgen_evaluator_set_jobs(failgen_evaluator* ev, unsigned jobs);
FAILGEN_API failgen_status failgen_evaluator_run(failgen_evaluator* ev, const char* dataset_dir,
                                                 const char* predictions_path, char** out_report_json);
FAILGEN_API void failgen_evaluator_free(failgen_evaluator* ev);

#ifdef __cplusplus
}
#endif

#endif /* FAILGEN_FAILGEN_H */
