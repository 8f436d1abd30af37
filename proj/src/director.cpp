#include "cinescript/director.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <thread>

namespace cine {

namespace {

// Shortest clean decimal: 8 -> "8", 8.5 -> "8.5", 0.125 -> "0.125".
std::string fmt_seconds(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  std::string s = buf;
  while (s.size() > 1 && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

// Runs `step` up to config.max_attempts times, sleeping between attempts.
// Only transient ServiceErrors are retried; anything else escapes at once.
// Exhaustion rethrows as `abort_code` with the attempt count in detail().
template <typename F>
auto with_retries(F&& step, const DirectorConfig& config, ErrorCode abort_code,
                  const std::string& what) {
  int attempts = std::max(1, config.max_attempts);
  for (int attempt = 1;; ++attempt) {
    try {
      return step();
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ServiceError)
        throw;
      if (attempt >= attempts)
        throw Error(abort_code,
                    what + " failed after " + std::to_string(attempt) +
                        " attempts: " + e.what(),
                    attempt);
      double delay =
          config.backoff_base_s * std::pow(config.backoff_factor, attempt - 1);
      if (delay > 0.0)
        std::this_thread::sleep_for(std::chrono::duration<double>(delay));
    }
  }
}

}  // namespace

std::string build_scene_prompt(const CinematicScript& script,
                               const Scene& scene,
                               const std::optional<FrameRef>& anchor) {
  std::string prompt;
  if (anchor) {
    prompt += kContinuityPreamble;
    prompt += "\n";
  }
  prompt += "Setting: " + script.scene_setting + "\n";
  for (const std::string& shot_id : scene.shot_ids) {
    const Shot* shot = script.find_shot(shot_id);
    if (!shot)
      throw Error(ErrorCode::UnknownShot,
                  "scene references unknown shot '" + shot_id + "'");
    prompt += "Shot " + shot->id + " [" + fmt_seconds(shot->interval.start_s) +
              "s - " + fmt_seconds(shot->interval.end_s) + "s] (" +
              to_string(shot->camera.shot_type, shot->camera.shot_type_label) +
              " | " +
              to_string(shot->camera.movement, shot->camera.movement_label) +
              " | " + (shot->camera.fixed_position ? "fixed" : "moving") +
              "): " + shot->description + "\n";
    for (const DialogueLine& line : shot->dialogue) {
      if (line.is_no_dialogue_marker) {
        prompt += "  ";
        prompt += kNoDialogueMarker;
        prompt += "\n";
      } else if (line.speaker_id.empty()) {
        prompt += "  \"" + line.text + "\"\n";
      } else {
        prompt += "  " + line.speaker_id + ": \"" + line.text + "\"\n";
      }
    }
  }
  return prompt;
}

FrameRef extract_anchor(const ClipRef& clip, MediaClient& media,
                        const DirectorConfig& config) {
  std::string uri = with_retries(
      [&] { return media.extract_frame(clip.uri, "last"); }, config,
      ErrorCode::MediaError, "frame extraction for '" + clip.uri + "'");
  return FrameRef{clip, FrameKind::Last, std::move(uri)};
}

ExecutionResult execute_plan(const CinematicScript& script,
                             const ScenePlan& plan, VideoGenClient& video,
                             MediaClient& media,
                             const DirectorConfig& config) {
  ExecutionResult result;
  std::optional<FrameRef> anchor;

  for (size_t i = 0; i < plan.scenes.size(); ++i) {
    const Scene& scene = plan.scenes[i];
    std::string prompt = build_scene_prompt(script, scene, anchor);
    result.artifact.prompt_log.push_back(prompt);

    ClipResponse clip_response;
    try {
      clip_response = with_retries(
          [&] {
            std::optional<std::string> anchor_uri;
            if (anchor) anchor_uri = anchor->uri;
            return video.generate(prompt, scene.duration_s, anchor_uri);
          },
          config, ErrorCode::VideoGenError,
          "video generation for scene " + std::to_string(scene.index));
    } catch (const Error& e) {
      result.error = ExecutionError{e.code(), scene.index,
                                    static_cast<int>(e.detail()), e.what()};
      return result;
    }
    result.artifact.clips.push_back(
        ClipRef{scene.index, clip_response.clip_uri, clip_response.duration_s});

    if (i + 1 < plan.scenes.size()) {
      try {
        anchor = extract_anchor(result.artifact.clips.back(), media, config);
      } catch (const Error& e) {
        // The missing anchor blocks the scene that needed it.
        result.error =
            ExecutionError{e.code(), plan.scenes[i + 1].index,
                           static_cast<int>(e.detail()), e.what()};
        return result;
      }
      result.artifact.anchors.push_back(*anchor);
    }
  }
  return result;
}

Json execution_json(const ExecutionResult& result) {
  Json out = Json::object();
  Json clips = Json::array();
  for (const ClipRef& clip : result.artifact.clips) {
    Json c = Json::object();
    c["scene_index"] = clip.scene_index;
    c["uri"] = clip.uri;
    c["duration_s"] = clip.duration_s;
    clips.push_back(std::move(c));
  }
  out["clips"] = std::move(clips);
  Json anchors = Json::array();
  for (const FrameRef& frame : result.artifact.anchors) {
    Json a = Json::object();
    a["source_scene_index"] = frame.source.scene_index;
    a["source_uri"] = frame.source.uri;
    a["kind"] = frame.kind == FrameKind::Last ? "last" : "first";
    a["uri"] = frame.uri;
    anchors.push_back(std::move(a));
  }
  out["anchors"] = std::move(anchors);
  out["prompt_log"] = result.artifact.prompt_log;
  out["complete"] = result.complete();
  if (result.error) {
    Json e = Json::object();
    e["code"] = to_string(result.error->code);
    e["scene_index"] = result.error->scene_index;
    e["attempts"] = result.error->attempts;
    e["message"] = result.error->message;
    out["error"] = std::move(e);
  }
  return out;
}

}  // namespace cine
