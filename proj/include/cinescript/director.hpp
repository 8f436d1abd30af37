#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cinescript/clients.hpp"
#include "cinescript/json.hpp"
#include "cinescript/planner.hpp"
#include "cinescript/script.hpp"

namespace cine {

// Fixed literal injected ahead of every anchored scene prompt.
inline constexpr std::string_view kContinuityPreamble =
    "Continuing from the previous scene.";

struct ClipRef {
  int scene_index = 0;
  std::string uri;  // opaque locator owned by the video service
  double duration_s = 0.0;
};

enum class FrameKind { First, Last };

struct FrameRef {
  ClipRef source;
  FrameKind kind = FrameKind::Last;
  std::string uri;
};

struct FilmArtifact {
  std::vector<ClipRef> clips;
  std::vector<FrameRef> anchors;  // anchors[i] came from clips[i]
  std::vector<std::string> prompt_log;  // one entry per attempted scene
};

struct DirectorConfig {
  int max_attempts = 3;        // per service call
  double backoff_base_s = 1.0; // exponential: base * factor^(attempt-1)
  double backoff_factor = 2.0;
};

// Scene prompt: optional continuity preamble, the setting, then each member
// shot with timestamps, camera spec and dialogue.  Deterministic.
std::string build_scene_prompt(const CinematicScript& script,
                               const Scene& scene,
                               const std::optional<FrameRef>& anchor);

// Pulls the clip's last frame through the media service (with retries) for
// use as the next scene's visual anchor.
FrameRef extract_anchor(const ClipRef& clip, MediaClient& media,
                        const DirectorConfig& config = {});

struct ExecutionError {
  ErrorCode code = ErrorCode::Ok;  // VideoGenError or MediaError
  int scene_index = 0;
  int attempts = 0;
  std::string message;
};

struct ExecutionResult {
  FilmArtifact artifact;
  std::optional<ExecutionError> error;  // set when the run aborted
  bool complete() const { return !error.has_value(); }
};

// Renders every scene strictly in order, threading the previous clip's last
// frame as the next scene's anchor.  A scene that still fails after retries
// aborts the run; work finished so far is returned alongside the error.
ExecutionResult execute_plan(const CinematicScript& script,
                             const ScenePlan& plan, VideoGenClient& video,
                             MediaClient& media,
                             const DirectorConfig& config = {});

Json execution_json(const ExecutionResult& result);

}  // namespace cine
