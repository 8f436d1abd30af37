#ifndef CINESCRIPT_CAPI_H
#define CINESCRIPT_CAPI_H

/* C interface to the cinescript shared library.
 *
 * Conventions:
 *   - Every fallible function returns an int status code: 0 on success,
 *     otherwise one of the CINE_E_* codes below.  On failure the thread-local
 *     last-error message and detail are set; query them with
 *     cine_last_error_message() / cine_last_error_detail().
 *   - Output strings (char**) are heap-allocated UTF-8, owned by the caller,
 *     and must be released with cine_string_free().  They are untouched on
 *     failure.
 *   - Handles (cine_ctx, cine_script) are opaque; release them with the
 *     matching *_free function.  NULL is always safe to pass to *_free.
 *   - All functions are safe to call from multiple threads as long as each
 *     handle is used by one thread at a time.
 */

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

/* ---- status codes -------------------------------------------------- */

enum {
  CINE_OK = 0,

  CINE_E_SYNTAX = 1,
  CINE_E_SCHEMA = 2,
  CINE_E_INVARIANT = 3,

  CINE_E_INVALID_CONFIG = 10,
  CINE_E_RANGE = 11,
  CINE_E_LENGTH_MISMATCH = 12,
  CINE_E_USAGE = 13,

  CINE_E_DEGENERATE_GROUP = 20,
  CINE_E_ZERO_VECTOR = 21,
  CINE_E_DIM_MISMATCH = 22,

  CINE_E_MISSING_INSTRUCTION = 30,
  CINE_E_NO_FRAMES_IN_INTERVALS = 31,
  CINE_E_NO_FRAMES = 32,

  CINE_E_UNKNOWN_SHOT = 40,
  CINE_E_UNPLANNABLE_SHOT = 41,

  CINE_E_GENERATOR = 50,
  CINE_E_MALFORMED_DRAFT = 51,
  CINE_E_VIDEO_GEN = 52,
  CINE_E_MEDIA = 53,

  CINE_E_MISSING_SLOT = 60,
  CINE_E_NO_JSON_FOUND = 61,
  CINE_E_UNKNOWN_DIMENSION = 62,
  CINE_E_MISSING_DIMENSION = 63,
  CINE_E_SCORE_OUT_OF_RANGE = 64,
  CINE_E_NON_INTEGER_SCORE = 65,
  CINE_E_EMPTY_INPUT = 66,
  CINE_E_MIXED_RUBRICS = 67,

  CINE_E_SERVICE = 70,
  CINE_E_PROTOCOL = 71,
  CINE_E_IO = 72
};

/* ---- library info and error reporting ------------------------------ */

/* Static strings; do not free. */
const char* cine_version(void);
const char* cine_error_name(int code);

/* Message and numeric detail of the most recent failure on this thread.
 * The message pointer stays valid until the next failing call on the same
 * thread.  Detail is -1 when the failure carried none. */
const char* cine_last_error_message(void);
long cine_last_error_detail(void);

void cine_string_free(char* s);

/* ---- script handles ------------------------------------------------ */

typedef struct cine_script cine_script;

/* Parses a script document.  max_shot_seconds <= 0 selects the default
 * (10 s) per-shot duration cap. */
int cine_script_parse(const char* json_text, double max_shot_seconds,
                      cine_script** out);
int cine_script_serialize(const cine_script* script, char** out_json);
long cine_script_shot_count(const cine_script* script);
void cine_script_free(cine_script* script);

/* Structural report for a decodable document that is not necessarily a
 * valid script.  Succeeds (status 0) whenever json_text decodes into the
 * script shape; the report's is_valid field says whether every script
 * invariant holds. */
int cine_format_report(const char* json_text, double max_shot_seconds,
                       char** out_json);

/* ---- pipeline context ---------------------------------------------- */

typedef struct cine_ctx cine_ctx;

/* Creates a context from a config JSON document (NULL or "" for defaults).
 * Unknown keys and out-of-range values are rejected. */
int cine_ctx_create(const char* config_json, cine_ctx** out);
void cine_ctx_free(cine_ctx* ctx);

/* Current effective config as JSON. */
int cine_ctx_config(const cine_ctx* ctx, char** out_json);

/* Starts in-process mock services on a loopback port and points every
 * service endpoint at them.  options_json may be NULL; recognized keys:
 *   preference_score (number), video_fail_from_call (int),
 *   video_failures (int), generator_drafts ([string]),
 *   judge_responses ([string]), embed_dim (int), seq_base (int). */
int cine_ctx_enable_mock_services(cine_ctx* ctx, const char* options_json);

/* Transcript of all requests the mocks have served, as a JSON array.
 * Fails unless mock services are enabled on this context. */
int cine_ctx_mock_transcript(const cine_ctx* ctx, char** out_json);

/* Fixes the context clock: retry/backoff waits complete immediately and any
 * time-derived output becomes a pure function of the seed. */
void cine_ctx_seed_clock(cine_ctx* ctx, long epoch_seconds);

/* ---- pipeline commands --------------------------------------------- */

/* Structural + semantic validation.  Output:
 *   {format_report, verification_report|null, all_pass}. */
int cine_cmd_validate(cine_ctx* ctx, const char* script_json, char** out_json);

/* Generate-verify-correct loop against the configured generator service.
 * context_json: {scene_setting, characters, source_dialogue}. */
int cine_cmd_correct(cine_ctx* ctx, const char* context_json, char** out_json);

/* Scene segmentation.  window_s <= 0 selects the configured window. */
int cine_cmd_plan(cine_ctx* ctx, const char* script_json, double window_s,
                  char** out_json);

/* Runs a plan against the video-generation and media services.  Succeeds
 * even when generation aborts mid-plan; the artifact's complete/error
 * fields describe the failure. */
int cine_cmd_direct(cine_ctx* ctx, const char* script_json,
                    const char* plan_json, char** out_json);

/* Hybrid reward for one script.  human_score in [0,1] uses that value;
 * human_score < 0 queries the configured preference service. */
int cine_cmd_reward(cine_ctx* ctx, const char* script_json,
                    double human_score, char** out_json);

/* Group-relative advantages for a reward group (n >= 2). */
int cine_cmd_reward_group(cine_ctx* ctx, const double* rewards, size_t n,
                          char** out_json);

/* Renders rubric prompts, queries the judge service, parses scorecards.
 * items_json: array of slot objects (or a single slot object).  Output:
 *   {rubric, scorecards, failures, summary|null}. */
int cine_cmd_evaluate(cine_ctx* ctx, const char* rubric, const char* items_json,
                      char** out_json);

/* Visual-script alignment from an embedding series in JSONL form. */
int cine_cmd_vsa(cine_ctx* ctx, const char* script_json, const char* jsonl_text,
                 char** out_json);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* CINESCRIPT_CAPI_H */
