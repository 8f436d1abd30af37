#include "cinescript/capi.h"

#include <cstdlib>
#include <cstring>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cinescript/config.hpp"
#include "cinescript/correction.hpp"
#include "cinescript/critic.hpp"
#include "cinescript/director.hpp"
#include "cinescript/errors.hpp"
#include "cinescript/metrics.hpp"
#include "cinescript/mock_services.hpp"
#include "cinescript/planner.hpp"
#include "cinescript/reward.hpp"
#include "cinescript/script.hpp"
#include "cinescript/services.hpp"
#include "cinescript/verify.hpp"

using namespace cine;

namespace {

thread_local std::string g_last_message;
thread_local long g_last_detail = -1;

int set_error(int code, std::string message, long detail = -1) {
  g_last_message = std::move(message);
  g_last_detail = detail;
  return code;
}

// Runs fn, translating exceptions into status codes + thread-local detail.
template <typename Fn>
int guarded(Fn&& fn) {
  try {
    fn();
    return CINE_OK;
  } catch (const Error& e) {
    return set_error(static_cast<int>(e.code()), e.what(), e.detail());
  } catch (const std::exception& e) {
    return set_error(CINE_E_INVARIANT, e.what());
  }
}

char* copy_out(const std::string& s) {
  char* mem = static_cast<char*>(std::malloc(s.size() + 1));
  std::memcpy(mem, s.c_str(), s.size() + 1);
  return mem;
}

void emit(char** out, const Json& doc) { *out = copy_out(doc.dump(2) + "\n"); }

int require_arg(const void* p, const char* what) {
  if (p != nullptr) return CINE_OK;
  return set_error(CINE_E_USAGE, std::string(what) + " must not be NULL");
}

}  // namespace

struct cine_script {
  CinematicScript script;
};

struct cine_ctx {
  PipelineConfig config;
  std::unique_ptr<MockServices> mocks;
  bool clock_seeded = false;
  long clock_epoch = 0;

  // With a seeded clock time is simulated, so retry waits cost nothing.
  HttpRetryPolicy policy() const {
    HttpRetryPolicy p;
    p.max_attempts = config.retry.http_attempts;
    p.backoff_base_s = clock_seeded ? 0.0 : config.retry.backoff_base_s;
    p.backoff_factor = config.retry.backoff_factor;
    return p;
  }

  ParseOptions parse_options() const {
    return ParseOptions{config.max_shot_seconds};
  }

  VerifyConfig verify_options() const {
    VerifyConfig v;
    v.max_speed = config.max_speed;
    return v;
  }

  std::string endpoint(const std::string& url, const char* service) const {
    if (!url.empty()) return url;
    throw Error(ErrorCode::InvalidConfig,
                std::string("no ") + service +
                    " endpoint configured (set one in the config file or "
                    "enable mock services)");
  }
};

extern "C" {

const char* cine_version(void) { return "0.1.0"; }

const char* cine_error_name(int code) {
  return to_string(static_cast<ErrorCode>(code));
}

const char* cine_last_error_message(void) { return g_last_message.c_str(); }

long cine_last_error_detail(void) { return g_last_detail; }

void cine_string_free(char* s) { std::free(s); }

/* ---- script handles ------------------------------------------------ */

int cine_script_parse(const char* json_text, double max_shot_seconds,
                      cine_script** out) {
  if (int rc = require_arg(json_text, "json_text")) return rc;
  if (int rc = require_arg(out, "out")) return rc;
  return guarded([&] {
    ParseOptions opts;
    if (max_shot_seconds > 0) opts.max_shot_seconds = max_shot_seconds;
    auto handle = std::make_unique<cine_script>();
    handle->script = parse_script(json_text, opts);
    *out = handle.release();
  });
}

int cine_script_serialize(const cine_script* script, char** out_json) {
  if (int rc = require_arg(script, "script")) return rc;
  if (int rc = require_arg(out_json, "out_json")) return rc;
  return guarded(
      [&] { *out_json = copy_out(serialize_script(script->script)); });
}

long cine_script_shot_count(const cine_script* script) {
  if (script == nullptr) return -1;
  return static_cast<long>(script->script.shots.size());
}

void cine_script_free(cine_script* script) { delete script; }

int cine_format_report(const char* json_text, double max_shot_seconds,
                       char** out_json) {
  if (int rc = require_arg(json_text, "json_text")) return rc;
  if (int rc = require_arg(out_json, "out_json")) return rc;
  return guarded([&] {
    ParseOptions opts;
    if (max_shot_seconds > 0) opts.max_shot_seconds = max_shot_seconds;
    CinematicScript script = decode_script(json_text);
    emit(out_json, format_report_json(validate_structure(script, opts)));
  });
}

/* ---- pipeline context ---------------------------------------------- */

int cine_ctx_create(const char* config_json, cine_ctx** out) {
  if (int rc = require_arg(out, "out")) return rc;
  return guarded([&] {
    auto ctx = std::make_unique<cine_ctx>();
    if (config_json != nullptr && config_json[0] != '\0') {
      Json doc;
      try {
        doc = Json::parse(config_json);
      } catch (const Json::parse_error& e) {
        throw Error(ErrorCode::InvalidConfig,
                    std::string("config is not valid JSON: ") + e.what());
      }
      ctx->config.apply(doc);
    }
    ctx->config.validate();
    *out = ctx.release();
  });
}

void cine_ctx_free(cine_ctx* ctx) { delete ctx; }

int cine_ctx_config(const cine_ctx* ctx, char** out_json) {
  if (int rc = require_arg(ctx, "ctx")) return rc;
  if (int rc = require_arg(out_json, "out_json")) return rc;
  return guarded([&] { emit(out_json, ctx->config.to_json()); });
}

int cine_ctx_enable_mock_services(cine_ctx* ctx, const char* options_json) {
  if (int rc = require_arg(ctx, "ctx")) return rc;
  return guarded([&] {
    MockOptions options;
    if (options_json != nullptr && options_json[0] != '\0') {
      Json doc;
      try {
        doc = Json::parse(options_json);
      } catch (const Json::parse_error& e) {
        throw Error(ErrorCode::InvalidConfig,
                    std::string("mock options are not valid JSON: ") + e.what());
      }
      if (!doc.is_object())
        throw Error(ErrorCode::InvalidConfig, "mock options must be an object");
      for (const auto& [key, value] : doc.items()) {
        if (key == "preference_score")
          options.preference_score = value.get<double>();
        else if (key == "video_fail_from_call")
          options.video_fail_from_call = value.get<int>();
        else if (key == "video_failures")
          options.video_failures = value.get<int>();
        else if (key == "generator_drafts")
          options.generator_drafts = value.get<std::vector<std::string>>();
        else if (key == "judge_responses")
          options.judge_responses = value.get<std::vector<std::string>>();
        else if (key == "embed_dim")
          options.embed_dim = value.get<int>();
        else if (key == "seq_base")
          options.seq_base = value.get<int>();
        else
          throw Error(ErrorCode::InvalidConfig,
                      "unknown mock option '" + key + "'");
      }
    }
    auto mocks = std::make_unique<MockServices>(std::move(options));
    mocks->start();
    ctx->config.endpoints = mocks->endpoints();
    ctx->mocks = std::move(mocks);
  });
}

int cine_ctx_mock_transcript(const cine_ctx* ctx, char** out_json) {
  if (int rc = require_arg(ctx, "ctx")) return rc;
  if (int rc = require_arg(out_json, "out_json")) return rc;
  return guarded([&] {
    if (!ctx->mocks)
      throw Error(ErrorCode::InvalidConfig,
                  "mock services are not enabled on this context");
    emit(out_json, ctx->mocks->transcript());
  });
}

void cine_ctx_seed_clock(cine_ctx* ctx, long epoch_seconds) {
  if (ctx == nullptr) return;
  ctx->clock_seeded = true;
  ctx->clock_epoch = epoch_seconds;
}

/* ---- pipeline commands --------------------------------------------- */

int cine_cmd_validate(cine_ctx* ctx, const char* script_json, char** out_json) {
  if (int rc = require_arg(ctx, "ctx")) return rc;
  if (int rc = require_arg(script_json, "script_json")) return rc;
  if (int rc = require_arg(out_json, "out_json")) return rc;
  return guarded([&] {
    CinematicScript script = decode_script(script_json);
    FormatReport format = validate_structure(script, ctx->parse_options());
    Json out = Json::object();
    out["format_report"] = format_report_json(format);
    if (format.is_valid) {
      VerificationReport report =
          run_verification(script, ctx->verify_options());
      out["verification_report"] = report_json(report);
      out["all_pass"] = report.all_pass;
    } else {
      out["verification_report"] = nullptr;
      out["all_pass"] = false;
    }
    emit(out_json, out);
  });
}

int cine_cmd_correct(cine_ctx* ctx, const char* context_json, char** out_json) {
  if (int rc = require_arg(ctx, "ctx")) return rc;
  if (int rc = require_arg(context_json, "context_json")) return rc;
  if (int rc = require_arg(out_json, "out_json")) return rc;
  return guarded([&] {
    Json doc;
    try {
      doc = Json::parse(context_json);
    } catch (const Json::parse_error& e) {
      throw Error(ErrorCode::SyntaxError, e.what());
    }
    CorrectionContext context = CorrectionContext::from_json(doc);
    HttpGeneratorClient generator(
        ctx->endpoint(ctx->config.endpoints.generator, "generator"),
        ctx->policy());
    CorrectionConfig config;
    config.max_rounds = ctx->config.max_rounds;
    config.keep_best = ctx->config.keep_best;
    config.parse = ctx->parse_options();
    config.verify = ctx->verify_options();
    emit(out_json, outcome_json(correction_loop(context, generator, config)));
  });
}

int cine_cmd_plan(cine_ctx* ctx, const char* script_json, double window_s,
                  char** out_json) {
  if (int rc = require_arg(ctx, "ctx")) return rc;
  if (int rc = require_arg(script_json, "script_json")) return rc;
  if (int rc = require_arg(out_json, "out_json")) return rc;
  return guarded([&] {
    CinematicScript script =
        parse_script(script_json, ctx->parse_options());
    double window = window_s > 0 ? window_s : ctx->config.window_s;
    emit(out_json, plan_json(segment_scenes(script, window)));
  });
}

int cine_cmd_direct(cine_ctx* ctx, const char* script_json,
                    const char* plan_json_text, char** out_json) {
  if (int rc = require_arg(ctx, "ctx")) return rc;
  if (int rc = require_arg(script_json, "script_json")) return rc;
  if (int rc = require_arg(plan_json_text, "plan_json")) return rc;
  if (int rc = require_arg(out_json, "out_json")) return rc;
  return guarded([&] {
    CinematicScript script =
        parse_script(script_json, ctx->parse_options());
    Json doc;
    try {
      doc = Json::parse(plan_json_text);
    } catch (const Json::parse_error& e) {
      throw Error(ErrorCode::SyntaxError, e.what());
    }
    ScenePlan plan = plan_from_json(doc);
    HttpVideoGenClient videogen(
        ctx->endpoint(ctx->config.endpoints.videogen, "videogen"),
        ctx->policy());
    HttpMediaClient media(
        ctx->endpoint(ctx->config.endpoints.media, "media"), ctx->policy());
    DirectorConfig config;
    config.max_attempts = ctx->config.retry.http_attempts;
    config.backoff_base_s =
        ctx->clock_seeded ? 0.0 : ctx->config.retry.backoff_base_s;
    config.backoff_factor = ctx->config.retry.backoff_factor;
    emit(out_json,
         execution_json(execute_plan(script, plan, videogen, media, config)));
  });
}

int cine_cmd_reward(cine_ctx* ctx, const char* script_json,
                    double human_score, char** out_json) {
  if (int rc = require_arg(ctx, "ctx")) return rc;
  if (int rc = require_arg(script_json, "script_json")) return rc;
  if (int rc = require_arg(out_json, "out_json")) return rc;
  return guarded([&] {
    CinematicScript script =
        parse_script(script_json, ctx->parse_options());
    FormatReport format = validate_structure(script, ctx->parse_options());
    VerificationReport report = run_verification(script, ctx->verify_options());
    double r_human = human_score;
    if (r_human < 0) {
      HttpPreferenceClient preference(
          ctx->endpoint(ctx->config.endpoints.preference, "preference"),
          ctx->policy(), ctx->config.max_in_flight);
      r_human = preference.score(serialize_script(script));
    }
    emit(out_json, reward_breakdown_json(reward_breakdown(
                       report, format, r_human, ctx->config.alpha)));
  });
}

int cine_cmd_reward_group(cine_ctx* ctx, const double* rewards, size_t n,
                          char** out_json) {
  if (int rc = require_arg(ctx, "ctx")) return rc;
  if (int rc = require_arg(rewards, "rewards")) return rc;
  if (int rc = require_arg(out_json, "out_json")) return rc;
  return guarded([&] {
    emit(out_json,
         group_advantages_json(group_advantages(
             std::span<const double>(rewards, n), ctx->config.epsilon)));
  });
}

int cine_cmd_evaluate(cine_ctx* ctx, const char* rubric, const char* items_json,
                      char** out_json) {
  if (int rc = require_arg(ctx, "ctx")) return rc;
  if (int rc = require_arg(rubric, "rubric")) return rc;
  if (int rc = require_arg(items_json, "items_json")) return rc;
  if (int rc = require_arg(out_json, "out_json")) return rc;
  return guarded([&] {
    const Rubric& r = Rubric::by_name(rubric);
    Json doc;
    try {
      doc = Json::parse(items_json);
    } catch (const Json::parse_error& e) {
      throw Error(ErrorCode::SyntaxError, e.what());
    }
    if (doc.is_object()) doc = Json::array({doc});
    if (!doc.is_array())
      throw Error(ErrorCode::SchemaError,
                  "items must be a JSON object or array of objects");
    std::vector<std::map<std::string, std::string>> items;
    for (size_t i = 0; i < doc.size(); ++i) {
      const Json& entry = doc[i];
      if (!entry.is_object())
        throw Error(ErrorCode::SchemaError,
                    "items[" + std::to_string(i) + "] must be an object");
      std::map<std::string, std::string> slots;
      for (const auto& [key, value] : entry.items()) {
        if (!value.is_string())
          throw Error(ErrorCode::SchemaError,
                      "items[" + std::to_string(i) + "]." + key +
                          " must be a string");
        slots[key] = value.get<std::string>();
      }
      items.push_back(std::move(slots));
    }
    if (!ctx->config.data_dir.empty())
      setenv("CINE_DATA_DIR", ctx->config.data_dir.c_str(), 1);

    HttpLlmClient judge(ctx->endpoint(ctx->config.endpoints.judge, "judge"),
                        ctx->policy());
    EvalOptions options;
    options.retries = ctx->config.retry.judge_retries;
    options.max_in_flight = ctx->config.max_in_flight;
    EvalRun run = evaluate(items, r, judge, options);

    Json out = Json::object();
    out["rubric"] = r.name;
    Json cards = Json::array();
    for (const Scorecard& card : run.scorecards)
      cards.push_back(scorecard_json(card));
    out["scorecards"] = std::move(cards);
    Json failures = Json::array();
    for (const FailedItem& item : run.failures)
      failures.push_back(Json{{"index", item.index},
                              {"error", item.error},
                              {"attempts", item.attempts}});
    out["failures"] = std::move(failures);
    out["summary"] = run.scorecards.empty()
                         ? Json(nullptr)
                         : summary_json(aggregate(run.scorecards));
    emit(out_json, out);
  });
}

int cine_cmd_vsa(cine_ctx* ctx, const char* script_json, const char* jsonl_text,
                 char** out_json) {
  if (int rc = require_arg(ctx, "ctx")) return rc;
  if (int rc = require_arg(script_json, "script_json")) return rc;
  if (int rc = require_arg(jsonl_text, "jsonl_text")) return rc;
  return guarded([&] {
    CinematicScript script =
        parse_script(script_json, ctx->parse_options());
    EmbeddingSeries series = EmbeddingSeries::from_jsonl(jsonl_text);
    emit(out_json, vsa_json(vsa(script, series)));
  });
}

}  // extern "C"
