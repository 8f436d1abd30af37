#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cinescript/director.hpp"
#include "cinescript/errors.hpp"
#include "cinescript/planner.hpp"
#include "cinescript/script.hpp"
#include "testutil.hpp"

using namespace cine;
using namespace testutil;

namespace {

struct FakeVideo : VideoGenClient {
  struct Call {
    std::string prompt;
    double duration_s;
    std::optional<std::string> anchor;
  };
  std::vector<Call> calls;
  std::function<void(int)> on_call;  // may throw; receives the 1-based call no.
  int clips_issued = 0;

  ClipResponse generate(const std::string& prompt, double duration_s,
                        const std::optional<std::string>& anchor) override {
    calls.push_back({prompt, duration_s, anchor});
    if (on_call) on_call(static_cast<int>(calls.size()));
    ++clips_issued;
    return {"clip-" + std::to_string(clips_issued), duration_s};
  }
};

struct FakeMedia : MediaClient {
  struct Call {
    std::string clip_uri;
    std::string position;
  };
  std::vector<Call> calls;
  std::function<void(int)> on_call;

  std::string extract_frame(const std::string& clip_uri,
                            const std::string& position) override {
    calls.push_back({clip_uri, position});
    if (on_call) on_call(static_cast<int>(calls.size()));
    return "frame-" + position + "-" + clip_uri;
  }
};

DirectorConfig fast_config(int max_attempts = 3) {
  DirectorConfig config;
  config.max_attempts = max_attempts;
  config.backoff_base_s = 0.0;  // no sleeping in tests
  return config;
}

struct Setup {
  CinematicScript script;
  ScenePlan plan;
};

Setup three_scene_setup() {
  Setup s;
  s.script = parse_script(read_fixture("three_scene.json"));
  s.plan = segment_scenes(s.script, 10.0);
  return s;
}

}  // namespace

TEST_CASE("three-scene plan renders in order with threaded anchors") {
  Setup s = three_scene_setup();
  REQUIRE(s.plan.scenes.size() == 3);

  FakeVideo video;
  FakeMedia media;
  ExecutionResult result =
      execute_plan(s.script, s.plan, video, media, fast_config());

  REQUIRE(result.complete());
  REQUIRE(result.artifact.clips.size() == 3);
  REQUIRE(result.artifact.anchors.size() == 2);
  REQUIRE(result.artifact.prompt_log.size() == 3);
  REQUIRE(video.calls.size() == 3);

  // First scene has no anchor; every later scene is anchored on the last
  // frame of the clip before it.
  CHECK(!video.calls[0].anchor.has_value());
  CHECK(video.calls[1].anchor == "frame-last-clip-1");
  CHECK(video.calls[2].anchor == "frame-last-clip-2");

  // The anchored prompts open with the fixed continuity line.
  const std::string preamble = std::string(kContinuityPreamble) + "\n";
  CHECK(result.artifact.prompt_log[0].rfind(preamble, 0) == std::string::npos);
  CHECK(result.artifact.prompt_log[1].rfind(preamble, 0) == 0);
  CHECK(result.artifact.prompt_log[2].rfind(preamble, 0) == 0);

  // Scene durations ride along into the video requests.
  for (size_t i = 0; i < 3; ++i) {
    CHECK(video.calls[i].duration_s == s.plan.scenes[i].duration_s);
    CHECK(video.calls[i].prompt == result.artifact.prompt_log[i]);
    CHECK(result.artifact.clips[i].scene_index == static_cast<int>(i));
  }

  // Only the two inter-scene frames are extracted, always the last frame.
  REQUIRE(media.calls.size() == 2);
  CHECK(media.calls[0].clip_uri == "clip-1");
  CHECK(media.calls[1].clip_uri == "clip-2");
  for (const FakeMedia::Call& call : media.calls)
    CHECK(call.position == "last");

  for (size_t i = 0; i < result.artifact.anchors.size(); ++i) {
    const FrameRef& anchor = result.artifact.anchors[i];
    CHECK(anchor.kind == FrameKind::Last);
    CHECK(anchor.source.uri == result.artifact.clips[i].uri);
    CHECK(anchor.source.scene_index == static_cast<int>(i));
  }
}

TEST_CASE("scene prompts list setting, shots, camera and dialogue verbatim") {
  Setup s = three_scene_setup();
  std::string unanchored =
      build_scene_prompt(s.script, s.plan.scenes[0], std::nullopt);
  CHECK(unanchored ==
        "Setting: A quiet harbor at dawn.\n"
        "Shot d1 [0s - 5s] (panoramic | crane | moving): Mist hangs over the "
        "water.\n"
        "  [No Dialogue]\n"
        "Shot d2 [5s - 9s] (medium | static | fixed): Ana stands at the "
        "rail.\n"
        "  ana: \"The boats are already out.\"\n");

  FrameRef anchor;
  anchor.uri = "frame-last-clip-1";
  std::string anchored = build_scene_prompt(s.script, s.plan.scenes[1], anchor);
  CHECK(anchored ==
        "Continuing from the previous scene.\n"
        "Setting: A quiet harbor at dawn.\n"
        "Shot d3 [9s - 17s] (wide | track | moving): Gulls wheel over the "
        "pier.\n"
        "  [No Dialogue]\n");
}

TEST_CASE("prompts render fractional bounds and unattributed lines") {
  CinematicScript script;
  script.scene_setting = "Test floor.";
  Shot shot = make_shot("x1", 0.5, 4.25, "A door opens.");
  shot.dialogue.push_back(make_line("", "Is anyone there?"));
  script.shots.push_back(shot);

  Scene scene;
  scene.shot_ids = {"x1"};
  std::string prompt = build_scene_prompt(script, scene, std::nullopt);
  CHECK(prompt ==
        "Setting: Test floor.\n"
        "Shot x1 [0.5s - 4.25s] (medium | pan | moving): A door opens.\n"
        "  \"Is anyone there?\"\n");
}

TEST_CASE("a plan naming a missing shot is rejected") {
  Setup s = three_scene_setup();
  Scene ghost;
  ghost.shot_ids = {"d1", "zz"};
  try {
    build_scene_prompt(s.script, ghost, std::nullopt);
    FAIL("expected UnknownShot");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnknownShot);
    CHECK(std::string(e.what()).find("'zz'") != std::string::npos);
  }
}

TEST_CASE("transient service failures are retried to success") {
  Setup s = three_scene_setup();
  FakeVideo video;
  FakeMedia media;
  // Video call 2 and media call 1 each fail twice before succeeding.
  int video_failures = 2, media_failures = 2;
  video.on_call = [&](int n) {
    if (n >= 2 && n <= 1 + video_failures)
      throw Error(ErrorCode::ServiceError, "video hiccup");
  };
  media.on_call = [&](int n) {
    if (n <= media_failures)
      throw Error(ErrorCode::ServiceError, "media hiccup");
  };

  ExecutionResult result =
      execute_plan(s.script, s.plan, video, media, fast_config(3));
  CHECK(result.complete());
  CHECK(result.artifact.clips.size() == 3);
  // 3 successes + 2 injected video failures; 2 successes + 2 media failures.
  CHECK(video.calls.size() == 5);
  CHECK(media.calls.size() == 4);
  // The retried scene still got the same anchor and prompt each attempt.
  CHECK(video.calls[1].anchor == video.calls[3].anchor);
  CHECK(video.calls[1].prompt == video.calls[3].prompt);
}

TEST_CASE("exhausted video retries abort with partial work preserved") {
  Setup s = three_scene_setup();
  FakeVideo video;
  FakeMedia media;
  video.on_call = [](int n) {
    if (n >= 2) throw Error(ErrorCode::ServiceError, "video down");
  };

  ExecutionResult result =
      execute_plan(s.script, s.plan, video, media, fast_config(3));
  REQUIRE(!result.complete());
  REQUIRE(result.error.has_value());
  CHECK(result.error->code == ErrorCode::VideoGenError);
  CHECK(result.error->scene_index == 1);
  CHECK(result.error->attempts == 3);
  CHECK(result.error->message.find("scene 1") != std::string::npos);

  // Scene 0 finished; its clip, its anchor and both prompts are retained.
  CHECK(result.artifact.clips.size() == 1);
  CHECK(result.artifact.anchors.size() == 1);
  CHECK(result.artifact.prompt_log.size() == 2);
  CHECK(video.calls.size() == 1 + 3);
}

TEST_CASE("a dead media service blocks the scene that needed the anchor") {
  Setup s = three_scene_setup();
  FakeVideo video;
  FakeMedia media;
  media.on_call = [](int) { throw Error(ErrorCode::ServiceError, "no media"); };

  ExecutionResult result =
      execute_plan(s.script, s.plan, video, media, fast_config(2));
  REQUIRE(!result.complete());
  CHECK(result.error->code == ErrorCode::MediaError);
  CHECK(result.error->scene_index == 1);  // the scene left without an anchor
  CHECK(result.error->attempts == 2);
  CHECK(result.artifact.clips.size() == 1);
  CHECK(result.artifact.anchors.empty());
  CHECK(result.artifact.prompt_log.size() == 1);
}

TEST_CASE("non-transient errors abort immediately without retries") {
  Setup s = three_scene_setup();
  FakeVideo video;
  FakeMedia media;
  video.on_call = [](int) {
    throw Error(ErrorCode::ProtocolError, "bad payload");
  };

  ExecutionResult result =
      execute_plan(s.script, s.plan, video, media, fast_config(3));
  REQUIRE(!result.complete());
  CHECK(result.error->code == ErrorCode::ProtocolError);
  CHECK(result.error->scene_index == 0);
  CHECK(video.calls.size() == 1);  // no retry on protocol violations
}

TEST_CASE("single-attempt config fails fast on the first hiccup") {
  Setup s = three_scene_setup();
  FakeVideo video;
  FakeMedia media;
  video.on_call = [](int n) {
    if (n == 1) throw Error(ErrorCode::ServiceError, "blip");
  };
  ExecutionResult result =
      execute_plan(s.script, s.plan, video, media, fast_config(1));
  REQUIRE(!result.complete());
  CHECK(result.error->code == ErrorCode::VideoGenError);
  CHECK(result.error->attempts == 1);
  CHECK(video.calls.size() == 1);
}

TEST_CASE("retry delays follow the configured backoff") {
  ClipRef clip{0, "clip-1", 4.0};
  FakeMedia media;
  media.on_call = [](int n) {
    if (n <= 2) throw Error(ErrorCode::ServiceError, "busy");
  };
  DirectorConfig config;
  config.max_attempts = 3;
  config.backoff_base_s = 0.01;
  config.backoff_factor = 2.0;  // waits 0.01 s then 0.02 s

  auto begin = std::chrono::steady_clock::now();
  FrameRef frame = extract_anchor(clip, media, config);
  double elapsed = std::chrono::duration<double>(
                       std::chrono::steady_clock::now() - begin)
                       .count();
  CHECK(frame.uri == "frame-last-clip-1");
  CHECK(media.calls.size() == 3);
  CHECK(elapsed >= 0.03);
}

TEST_CASE("anchor extraction is deterministic and keeps its source") {
  ClipRef clip{4, "clip-9", 6.5};
  FakeMedia media;
  FrameRef a = extract_anchor(clip, media, fast_config());
  FrameRef b = extract_anchor(clip, media, fast_config());
  CHECK(a.uri == b.uri);
  CHECK(a.kind == FrameKind::Last);
  CHECK(a.source.uri == "clip-9");
  CHECK(a.source.scene_index == 4);
  CHECK(a.source.duration_s == 6.5);
}

TEST_CASE("an empty plan completes with an empty artifact") {
  CinematicScript script;
  script.scene_setting = "Nothing.";
  ScenePlan plan;
  plan.window_s = 10.0;
  plan.effective_window_s = 9.0;
  FakeVideo video;
  FakeMedia media;
  ExecutionResult result = execute_plan(script, plan, video, media);
  CHECK(result.complete());
  CHECK(result.artifact.clips.empty());
  CHECK(result.artifact.prompt_log.empty());
  CHECK(video.calls.empty());
}

TEST_CASE("execution JSON reflects success and failure shapes") {
  Setup s = three_scene_setup();
  {
    FakeVideo video;
    FakeMedia media;
    Json doc = execution_json(
        execute_plan(s.script, s.plan, video, media, fast_config()));
    CHECK(doc["complete"] == true);
    CHECK(!doc.contains("error"));
    REQUIRE(doc["clips"].size() == 3);
    CHECK(doc["clips"][0]["uri"] == "clip-1");
    CHECK(doc["clips"][1]["duration_s"] == 8.0);
    REQUIRE(doc["anchors"].size() == 2);
    CHECK(doc["anchors"][0]["kind"] == "last");
    CHECK(doc["anchors"][0]["source_uri"] == "clip-1");
    CHECK(doc["prompt_log"].size() == 3);
  }
  {
    FakeVideo video;
    FakeMedia media;
    video.on_call = [](int n) {
      if (n >= 2) throw Error(ErrorCode::ServiceError, "down");
    };
    Json doc = execution_json(
        execute_plan(s.script, s.plan, video, media, fast_config(2)));
    CHECK(doc["complete"] == false);
    REQUIRE(doc.contains("error"));
    CHECK(doc["error"]["code"] == "video_gen_error");
    CHECK(doc["error"]["scene_index"] == 1);
    CHECK(doc["error"]["attempts"] == 2);
  }
}

TEST_CASE("identical inputs render byte-identical artifacts") {
  Setup s = three_scene_setup();
  FakeVideo v1, v2;
  FakeMedia m1, m2;
  Json a = execution_json(execute_plan(s.script, s.plan, v1, m1, fast_config()));
  Json b = execution_json(execute_plan(s.script, s.plan, v2, m2, fast_config()));
  CHECK(a.dump() == b.dump());
}
