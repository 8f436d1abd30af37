#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <memory>
#include <string>

#include "cinescript/capi.h"
#include "cinescript/json.hpp"
#include "cinescript/script.hpp"
#include "testutil.hpp"

using cine::Json;
using testutil::read_fixture;

namespace {

struct OutString {
  char* ptr = nullptr;
  ~OutString() { cine_string_free(ptr); }
  std::string str() const { return ptr ? std::string(ptr) : std::string(); }
  Json json() const { return Json::parse(str()); }
};

struct Ctx {
  cine_ctx* ptr = nullptr;
  explicit Ctx(const char* config = nullptr) {
    REQUIRE(cine_ctx_create(config, &ptr) == CINE_OK);
  }
  ~Ctx() { cine_ctx_free(ptr); }
  operator cine_ctx*() { return ptr; }
};

void enable_mocks(cine_ctx* ctx, const char* options = nullptr) {
  REQUIRE(cine_ctx_enable_mock_services(ctx, options) == CINE_OK);
}

std::string last_message() { return cine_last_error_message(); }

const char* kMiniContext = R"({
  "scene_setting": "A quiet harbor at dawn.",
  "characters": [
    {"id": "ana", "name": "Ana",
     "appearance": "a young woman in a grey coat",
     "initial_position": [0.0, 0.0]}
  ],
  "source_dialogue": [
    {"speaker": "ana", "text": "The boats are already out."},
    {"speaker": "ana", "text": "They left before dawn."}
  ]
})";

}  // namespace

TEST_CASE("status codes carry the documented names") {
  const std::pair<int, const char*> expected[] = {
      {CINE_OK, "ok"},
      {CINE_E_SYNTAX, "syntax_error"},
      {CINE_E_SCHEMA, "schema_error"},
      {CINE_E_INVARIANT, "invariant_error"},
      {CINE_E_INVALID_CONFIG, "invalid_config"},
      {CINE_E_RANGE, "range_error"},
      {CINE_E_LENGTH_MISMATCH, "length_mismatch"},
      {CINE_E_USAGE, "usage_error"},
      {CINE_E_DEGENERATE_GROUP, "degenerate_group"},
      {CINE_E_ZERO_VECTOR, "zero_vector"},
      {CINE_E_DIM_MISMATCH, "dim_mismatch"},
      {CINE_E_MISSING_INSTRUCTION, "missing_instruction"},
      {CINE_E_NO_FRAMES_IN_INTERVALS, "no_frames_in_intervals"},
      {CINE_E_NO_FRAMES, "no_frames"},
      {CINE_E_UNKNOWN_SHOT, "unknown_shot"},
      {CINE_E_UNPLANNABLE_SHOT, "unplannable_shot"},
      {CINE_E_GENERATOR, "generator_error"},
      {CINE_E_MALFORMED_DRAFT, "malformed_draft"},
      {CINE_E_VIDEO_GEN, "video_gen_error"},
      {CINE_E_MEDIA, "media_error"},
      {CINE_E_MISSING_SLOT, "missing_slot"},
      {CINE_E_NO_JSON_FOUND, "no_json_found"},
      {CINE_E_UNKNOWN_DIMENSION, "unknown_dimension"},
      {CINE_E_MISSING_DIMENSION, "missing_dimension"},
      {CINE_E_SCORE_OUT_OF_RANGE, "score_out_of_range"},
      {CINE_E_NON_INTEGER_SCORE, "non_integer_score"},
      {CINE_E_EMPTY_INPUT, "empty_input"},
      {CINE_E_MIXED_RUBRICS, "mixed_rubrics"},
      {CINE_E_SERVICE, "service_error"},
      {CINE_E_PROTOCOL, "protocol_error"},
      {CINE_E_IO, "io_error"},
  };
  for (const auto& [code, name] : expected)
    CHECK(std::string(cine_error_name(code)) == name);
  CHECK(std::string(cine_version()) == "0.1.0");
}

TEST_CASE("script handles parse, count, serialize, and free") {
  std::string text = read_fixture("six_shot.json");
  cine_script* script = nullptr;
  REQUIRE(cine_script_parse(text.c_str(), 0.0, &script) == CINE_OK);
  CHECK(cine_script_shot_count(script) == 6);

  OutString out;
  REQUIRE(cine_script_serialize(script, &out.ptr) == CINE_OK);
  CHECK(out.str() == cine::serialize_script(cine::parse_script(text)));
  cine_script_free(script);
}

TEST_CASE("NULL arguments are usage errors, not crashes") {
  cine_script* script = nullptr;
  OutString out;
  CHECK(cine_script_parse(nullptr, 0.0, &script) == CINE_E_USAGE);
  CHECK(last_message() == "json_text must not be NULL");
  CHECK(cine_script_parse("{}", 0.0, nullptr) == CINE_E_USAGE);
  CHECK(cine_script_serialize(nullptr, &out.ptr) == CINE_E_USAGE);
  CHECK(cine_script_shot_count(nullptr) == -1);
  CHECK(cine_ctx_config(nullptr, &out.ptr) == CINE_E_USAGE);
  CHECK(cine_cmd_validate(nullptr, "{}", &out.ptr) == CINE_E_USAGE);

  cine_script_free(nullptr);
  cine_ctx_free(nullptr);
  cine_string_free(nullptr);
  cine_ctx_seed_clock(nullptr, 0);
  CHECK(out.ptr == nullptr);  // outputs untouched on failure
}

TEST_CASE("parse failures map to the precise status class") {
  cine_script* script = nullptr;
  CHECK(cine_script_parse("not json", 0.0, &script) == CINE_E_SYNTAX);
  CHECK(cine_last_error_detail() == -1);
  CHECK(!last_message().empty());
  CHECK(cine_script_parse(R"({"shots": 3})", 0.0, &script) == CINE_E_SCHEMA);

  Json doc = Json::parse(read_fixture("six_shot.json"));
  doc["shots"][0]["end"] = doc["shots"][0]["start"];
  CHECK(cine_script_parse(doc.dump().c_str(), 0.0, &script) ==
        CINE_E_INVARIANT);
  CHECK(script == nullptr);
}

TEST_CASE("the duration cap argument reaches the parser") {
  Json doc = Json::parse(read_fixture("six_shot.json"));  // has a 6 s shot
  std::string text = doc.dump();
  cine_script* script = nullptr;
  REQUIRE(cine_script_parse(text.c_str(), 0.0, &script) == CINE_OK);
  cine_script_free(script);
  script = nullptr;
  CHECK(cine_script_parse(text.c_str(), 4.0, &script) == CINE_E_INVARIANT);
  CHECK(last_message().find("exceeds") != std::string::npos);
}

TEST_CASE("format reports cover decodable but invalid documents") {
  Json doc = Json::parse(read_fixture("six_shot.json"));
  doc["shots"][2]["description"] = "";
  OutString out;
  REQUIRE(cine_format_report(doc.dump().c_str(), 0.0, &out.ptr) == CINE_OK);
  Json report = out.json();
  CHECK(report["is_valid"] == false);
  CHECK(report["missing_fields"].size() + report["malformed_entries"].size() >
        0);

  OutString clean;
  REQUIRE(cine_format_report(read_fixture("six_shot.json").c_str(), 0.0,
                             &clean.ptr) == CINE_OK);
  Json valid = clean.json();
  CHECK(valid["is_valid"] == true);
  CHECK(valid["fields_checked"] == 64);
}

TEST_CASE("contexts expose their effective configuration") {
  Ctx defaults;
  OutString out;
  REQUIRE(cine_ctx_config(defaults, &out.ptr) == CINE_OK);
  Json config = out.json();
  CHECK(config["alpha"] == 0.4);
  CHECK(config["beta"] == 0.04);
  CHECK(config["window_s"] == 10.0);
  CHECK(config["rubric"] == "script_eval");
  CHECK(config["retry"]["http_attempts"] == 3);
  CHECK(config["endpoints"]["generator"] == "");

  Ctx tuned(R"({"alpha": 0.7, "retry": {"http_attempts": 2}})");
  OutString tuned_out;
  REQUIRE(cine_ctx_config(tuned, &tuned_out.ptr) == CINE_OK);
  Json tuned_config = tuned_out.json();
  CHECK(tuned_config["alpha"] == 0.7);
  CHECK(tuned_config["retry"]["http_attempts"] == 2);
  CHECK(tuned_config["beta"] == 0.04);  // untouched keys keep defaults
}

TEST_CASE("bad configuration documents are rejected on creation") {
  cine_ctx* ctx = nullptr;
  CHECK(cine_ctx_create(R"({"alfa": 0.4})", &ctx) == CINE_E_INVALID_CONFIG);
  CHECK(last_message().find("unknown key 'alfa'") != std::string::npos);
  CHECK(cine_ctx_create(R"({"alpha": 2.0})", &ctx) == CINE_E_INVALID_CONFIG);
  CHECK(cine_ctx_create("[1]", &ctx) == CINE_E_INVALID_CONFIG);
  CHECK(cine_ctx_create("{nope", &ctx) == CINE_E_INVALID_CONFIG);
  CHECK(ctx == nullptr);
}

TEST_CASE("mock service options are validated") {
  Ctx ctx;
  CHECK(cine_ctx_enable_mock_services(ctx, R"({"bogus": 1})") ==
        CINE_E_INVALID_CONFIG);
  CHECK(last_message().find("unknown mock option 'bogus'") !=
        std::string::npos);

  OutString out;
  CHECK(cine_ctx_mock_transcript(ctx, &out.ptr) == CINE_E_INVALID_CONFIG);

  enable_mocks(ctx, R"({"preference_score": 0.5, "seq_base": 9})");
  OutString empty;
  REQUIRE(cine_ctx_mock_transcript(ctx, &empty.ptr) == CINE_OK);
  CHECK(empty.json() == Json::array());
}

TEST_CASE("validate reports both layers for a passing script") {
  Ctx ctx;
  OutString out;
  REQUIRE(cine_cmd_validate(ctx, read_fixture("corpus/01_all_pass.json").c_str(),
                            &out.ptr) == CINE_OK);
  Json doc = out.json();
  CHECK(doc["all_pass"] == true);
  CHECK(doc["format_report"]["is_valid"] == true);
  CHECK(doc["verification_report"]["all_pass"] == true);
}

TEST_CASE("validate surfaces semantic violations") {
  Ctx ctx;
  OutString out;
  REQUIRE(cine_cmd_validate(ctx, read_fixture("corpus/14_teleport.json").c_str(),
                            &out.ptr) == CINE_OK);
  Json doc = out.json();
  CHECK(doc["all_pass"] == false);
  CHECK(doc["verification_report"]["all_pass"] == false);
}

TEST_CASE("validate stops at structure when the document is invalid") {
  Json doc = Json::parse(read_fixture("six_shot.json"));
  doc["shots"][0]["description"] = "";
  Ctx ctx;
  OutString out;
  REQUIRE(cine_cmd_validate(ctx, doc.dump().c_str(), &out.ptr) == CINE_OK);
  Json report = out.json();
  CHECK(report["all_pass"] == false);
  CHECK(report["format_report"]["is_valid"] == false);
  CHECK(report["verification_report"].is_null());

  CHECK(cine_cmd_validate(ctx, "garbage", &out.ptr) == CINE_E_SYNTAX);
}

TEST_CASE("the correction loop converges against mock services") {
  Ctx ctx;
  enable_mocks(ctx);
  OutString out;
  REQUIRE(cine_cmd_correct(ctx, kMiniContext, &out.ptr) == CINE_OK);
  Json doc = out.json();
  CHECK(doc["converged"] == true);
  CHECK(doc["rounds_used"] == 1);
  CHECK(doc["round_history"].size() == 1);
  CHECK(doc["round_history"][0]["parsed"] == true);
  CHECK(doc["final_script"]["shots"].size() == 2);
  CHECK(doc["final_report"]["all_pass"] == true);
}

TEST_CASE("scripted bad drafts cost extra correction rounds") {
  Ctx ctx;
  enable_mocks(ctx, R"({"generator_drafts": ["this is not a script"]})");
  OutString out;
  REQUIRE(cine_cmd_correct(ctx, kMiniContext, &out.ptr) == CINE_OK);
  Json doc = out.json();
  CHECK(doc["converged"] == true);
  CHECK(doc["rounds_used"] == 2);
  CHECK(doc["round_history"][0]["parsed"] == false);
  CHECK(doc["round_history"][1]["parsed"] == true);
}

TEST_CASE("commands that need a service refuse to run without endpoints") {
  Ctx ctx;  // no endpoints configured, no mocks
  OutString out;
  CHECK(cine_cmd_correct(ctx, kMiniContext, &out.ptr) ==
        CINE_E_INVALID_CONFIG);
  CHECK(last_message().find("generator") != std::string::npos);
}

TEST_CASE("planning, directing, and their artifacts agree") {
  Ctx ctx;
  enable_mocks(ctx);
  std::string script = read_fixture("six_shot.json");

  OutString plan;
  REQUIRE(cine_cmd_plan(ctx, script.c_str(), 10.0, &plan.ptr) == CINE_OK);
  Json plan_doc = plan.json();
  CHECK(plan_doc["scenes"].size() == 4);
  CHECK(plan_doc["window"] == 10.0);

  // window_s <= 0 falls back to the configured window (also 10).
  OutString fallback;
  REQUIRE(cine_cmd_plan(ctx, script.c_str(), 0.0, &fallback.ptr) == CINE_OK);
  CHECK(fallback.str() == plan.str());

  OutString run;
  REQUIRE(cine_cmd_direct(ctx, script.c_str(), plan.str().c_str(), &run.ptr) ==
          CINE_OK);
  Json artifact = run.json();
  CHECK(artifact["complete"] == true);
  CHECK(!artifact.contains("error"));
  CHECK(artifact["clips"].size() == 4);
  CHECK(artifact["anchors"].size() == 3);
  CHECK(artifact["prompt_log"].size() == 4);
  CHECK(artifact["clips"][0]["uri"] == "mock://clip/1");
}

TEST_CASE("direction failures land in the artifact, not the status code") {
  Ctx ctx(R"({"retry": {"http_attempts": 2, "backoff_base_s": 0.0}})");
  enable_mocks(ctx, R"({"video_fail_from_call": 3})");  // scene 3 onward dies
  std::string script = read_fixture("six_shot.json");
  OutString plan;
  REQUIRE(cine_cmd_plan(ctx, script.c_str(), 10.0, &plan.ptr) == CINE_OK);

  OutString run;
  REQUIRE(cine_cmd_direct(ctx, script.c_str(), plan.str().c_str(), &run.ptr) ==
          CINE_OK);
  Json artifact = run.json();
  CHECK(artifact["complete"] == false);
  CHECK(artifact["error"]["code"] == "video_gen_error");
  CHECK(artifact["clips"].size() == 2);
}

TEST_CASE("reward with an explicit human score is exact") {
  Ctx ctx;
  OutString out;
  REQUIRE(cine_cmd_reward(ctx, read_fixture("corpus/01_all_pass.json").c_str(),
                          0.5, &out.ptr) == CINE_OK);
  Json doc = out.json();
  CHECK(doc["r_structure"] == 1.0);
  CHECK(doc["r_human"] == 0.5);
  CHECK(doc["r_total"] == 0.7);  // 0.4 * 1 + 0.6 * 0.5
}

TEST_CASE("a negative human score queries the preference service") {
  Ctx ctx;
  enable_mocks(ctx, R"({"preference_score": 0.5})");
  OutString out;
  REQUIRE(cine_cmd_reward(ctx, read_fixture("corpus/01_all_pass.json").c_str(),
                          -1.0, &out.ptr) == CINE_OK);
  CHECK(out.json()["r_total"] == 0.7);

  OutString transcript;
  REQUIRE(cine_ctx_mock_transcript(ctx, &transcript.ptr) == CINE_OK);
  Json entries = transcript.json();
  REQUIRE(entries.size() == 1);
  CHECK(entries[0]["service"] == "preference");
}

TEST_CASE("service failures carry the attempt count in the error detail") {
  Ctx ctx(R"({"endpoints": {"preference": "http://127.0.0.1:9"},
              "retry": {"http_attempts": 2, "backoff_base_s": 0.0}})");
  OutString out;
  CHECK(cine_cmd_reward(ctx, read_fixture("corpus/01_all_pass.json").c_str(),
                        -1.0, &out.ptr) == CINE_E_SERVICE);
  CHECK(cine_last_error_detail() == 2);
}

TEST_CASE("group advantages match the library math") {
  Ctx ctx;
  double rewards[] = {1.0, 0.0};
  OutString out;
  REQUIRE(cine_cmd_reward_group(ctx, rewards, 2, &out.ptr) == CINE_OK);
  Json doc = out.json();
  CHECK(doc["mean"] == 0.5);
  CHECK(doc["advantages"][0] == 0.9999999800000003);
  CHECK(doc["advantages"][1] == -0.9999999800000003);

  CHECK(cine_cmd_reward_group(ctx, rewards, 1, &out.ptr) ==
        CINE_E_DEGENERATE_GROUP);
  CHECK(cine_cmd_reward_group(ctx, nullptr, 2, &out.ptr) == CINE_E_USAGE);
}

TEST_CASE("evaluation aggregates mock judgements") {
  Ctx ctx;
  enable_mocks(ctx);
  OutString out;
  REQUIRE(cine_cmd_evaluate(
              ctx, "script_eval",
              R"({"source_dialogue": "a", "generated_script": "b"})",
              &out.ptr) == CINE_OK);
  Json doc = out.json();
  CHECK(doc["rubric"] == "script_eval");
  REQUIRE(doc["scorecards"].size() == 1);
  CHECK(doc["scorecards"][0]["scores"]["Format Compliance"] == 4);
  CHECK(doc["failures"].empty());
  CHECK(doc["summary"]["overall_mean"] == 4.0);  // (4+4+3+5)/4
}

TEST_CASE("judge failures are itemized with their attempt counts") {
  Ctx ctx;
  enable_mocks(ctx, R"({"judge_responses": ["nope", "nope", "nope"]})");
  OutString out;
  REQUIRE(cine_cmd_evaluate(
              ctx, "script_eval",
              R"([{"source_dialogue": "a", "generated_script": "b"}])",
              &out.ptr) == CINE_OK);
  Json doc = out.json();
  CHECK(doc["scorecards"].empty());
  REQUIRE(doc["failures"].size() == 1);
  CHECK(doc["failures"][0]["index"] == 0);
  CHECK(doc["failures"][0]["attempts"] == 3);  // judge_retries 2 + 1
  CHECK(doc["summary"].is_null());
}

TEST_CASE("evaluation validates rubric name and item shape") {
  Ctx ctx;
  enable_mocks(ctx);
  OutString out;
  CHECK(cine_cmd_evaluate(ctx, "no_such_rubric", "{}", &out.ptr) ==
        CINE_E_INVALID_CONFIG);
  CHECK(cine_cmd_evaluate(ctx, "script_eval", "42", &out.ptr) ==
        CINE_E_SCHEMA);
  CHECK(cine_cmd_evaluate(ctx, "script_eval", R"([{"k": 3}])", &out.ptr) ==
        CINE_E_SCHEMA);
  CHECK(cine_cmd_evaluate(ctx, "script_eval", "{broken", &out.ptr) ==
        CINE_E_SYNTAX);
}

TEST_CASE("visual alignment scoring through the C surface") {
  Ctx ctx;
  OutString out;
  REQUIRE(cine_cmd_vsa(ctx, read_fixture("vsa_script.json").c_str(),
                       read_fixture("vsa_embeddings.jsonl").c_str(),
                       &out.ptr) == CINE_OK);
  Json doc = out.json();
  CHECK(doc["score"] == 87.5);
  CHECK(doc["frames_used"] == 4);
}

TEST_CASE("identical mock runs produce identical artifacts") {
  auto run = [] {
    Ctx ctx;
    enable_mocks(ctx.ptr, R"({"seq_base": 1})");
    OutString out;
    REQUIRE(cine_cmd_correct(ctx, kMiniContext, &out.ptr) == CINE_OK);
    OutString transcript;
    REQUIRE(cine_ctx_mock_transcript(ctx, &transcript.ptr) == CINE_OK);
    return out.str() + "\x1f" + transcript.str();
  };
  CHECK(run() == run());
}
