#include "cinescript/planner.hpp"

#include <cmath>

#include "cinescript/errors.hpp"

namespace cine {

namespace {

// next[i] = index one past the last shot of a maximally filled scene
// starting at shot i; greedy_scenes[i] = scene count of the greedy packing
// of shots[i..n).  Greedy max-fill is optimal for interval partitioning, so
// greedy_scenes[i] is also the minimum achievable count for the suffix.
struct Packing {
  std::vector<size_t> next;
  std::vector<int> greedy_scenes;
};

Packing pack(const std::vector<double>& durations, double capacity) {
  size_t n = durations.size();
  Packing p;
  p.next.resize(n);
  p.greedy_scenes.assign(n + 1, 0);
  size_t j = 0;
  double load = 0.0;
  for (size_t i = 0; i < n; ++i) {
    if (j < i) {
      j = i;
      load = 0.0;
    }
    while (j < n && load + durations[j] <= capacity + kCapacityTolerance)
      load += durations[j++];
    p.next[i] = j;
    load -= durations[i];
  }
  for (size_t i = n; i-- > 0;)
    p.greedy_scenes[i] = 1 + p.greedy_scenes[p.next[i]];
  return p;
}

CutRationale rationale_for(const Shot& boundary_shot) {
  if (boundary_shot.semantic_breakpoint) return CutRationale::SemanticBreakpoint;
  if (boundary_shot.camera.fixed_position) return CutRationale::FixedCamera;
  return CutRationale::Capacity;
}

}  // namespace

const char* to_string(CutRationale r) {
  switch (r) {
    case CutRationale::SemanticBreakpoint: return "semantic_breakpoint";
    case CutRationale::FixedCamera: return "fixed_camera";
    case CutRationale::Capacity: return "capacity";
  }
  return "unknown";
}

ConstraintReport validate_shot_constraints(const CinematicScript& script,
                                           double max_shot_seconds) {
  if (!(max_shot_seconds > 0.0))
    throw Error(ErrorCode::InvalidConfig, "max_shot_seconds must be positive");
  ConstraintReport report;
  for (const Shot& shot : script.shots) {
    double d = shot.interval.duration();
    if (d > max_shot_seconds) {
      char reason[96];
      std::snprintf(reason, sizeof(reason),
                    "duration %.6g s exceeds maximum %.6g s", d,
                    max_shot_seconds);
      report.violations.push_back({shot.id, reason});
    }
  }
  return report;
}

ScenePlan segment_scenes(const CinematicScript& script, double window_s) {
  if (!(window_s > 0.0) || !std::isfinite(window_s))
    throw Error(ErrorCode::InvalidConfig, "window_s must be positive");

  ScenePlan plan;
  plan.window_s = window_s;
  plan.effective_window_s = kEffectiveWindowFactor * window_s;

  const size_t n = script.shots.size();
  std::vector<double> durations(n);
  for (size_t i = 0; i < n; ++i) {
    durations[i] = script.shots[i].interval.duration();
    if (durations[i] > plan.effective_window_s + kCapacityTolerance)
      throw Error(ErrorCode::UnplannableShot,
                  "shot '" + script.shots[i].id + "' (" +
                      std::to_string(durations[i]) +
                      " s) exceeds the effective window of " +
                      std::to_string(plan.effective_window_s) + " s");
  }
  if (n == 0) return plan;

  Packing p = pack(durations, plan.effective_window_s);

  size_t start = 0;
  while (start < n) {
    size_t fill_end = p.next[start];  // one past the capacity boundary
    size_t cut = fill_end - 1;        // index of the scene's last shot

    if (fill_end < n) {
      // A preferred boundary b < cut is safe only if starting the next
      // scene at b+1 still yields the same number of remaining scenes.
      auto feasible = [&](size_t b) {
        return p.greedy_scenes[b + 1] == p.greedy_scenes[fill_end];
      };
      bool moved = false;
      for (size_t b = cut + 1; b-- > start;) {
        if (script.shots[b].semantic_breakpoint && feasible(b)) {
          cut = b;
          moved = true;
          break;
        }
      }
      if (!moved) {
        for (size_t b = cut + 1; b-- > start;) {
          if (script.shots[b].camera.fixed_position && feasible(b)) {
            cut = b;
            break;
          }
        }
      }
    }

    Scene scene;
    scene.index = static_cast<int>(plan.scenes.size());
    scene.cut_rationale = rationale_for(script.shots[cut]);
    for (size_t i = start; i <= cut; ++i) {
      scene.shot_ids.push_back(script.shots[i].id);
      scene.duration_s += durations[i];
    }
    plan.scenes.push_back(std::move(scene));
    start = cut + 1;
  }
  return plan;
}

int plan_preference_score(const CinematicScript& script,
                          const ScenePlan& plan) {
  int score = 0;
  for (size_t i = 0; i + 1 < plan.scenes.size(); ++i) {
    const Scene& scene = plan.scenes[i];
    if (scene.shot_ids.empty()) continue;
    const Shot* boundary = script.find_shot(scene.shot_ids.back());
    if (!boundary)
      throw Error(ErrorCode::UnknownShot,
                  "plan references unknown shot '" + scene.shot_ids.back() +
                      "'");
    if (boundary->semantic_breakpoint)
      score += 2;
    else if (boundary->camera.fixed_position)
      score += 1;
  }
  return score;
}

Json plan_json(const ScenePlan& plan) {
  Json out = Json::object();
  out["window"] = plan.window_s;
  out["effective_window"] = plan.effective_window_s;
  Json scenes = Json::array();
  for (const Scene& scene : plan.scenes) {
    Json s = Json::object();
    s["index"] = scene.index;
    s["shot_ids"] = scene.shot_ids;
    s["duration"] = scene.duration_s;
    s["cut_rationale"] = to_string(scene.cut_rationale);
    scenes.push_back(std::move(s));
  }
  out["scenes"] = std::move(scenes);
  return out;
}

ScenePlan plan_from_json(const Json& doc) {
  auto fail = [](const std::string& what) -> void {
    throw Error(ErrorCode::SchemaError, "plan: " + what);
  };
  if (!doc.is_object() || !doc.contains("window") || !doc.contains("scenes"))
    fail("expected {window, effective_window, scenes}");
  ScenePlan plan;
  if (!doc["window"].is_number()) fail("window: expected a number");
  plan.window_s = doc["window"].get<double>();
  if (doc.contains("effective_window")) {
    if (!doc["effective_window"].is_number())
      fail("effective_window: expected a number");
    plan.effective_window_s = doc["effective_window"].get<double>();
  } else {
    plan.effective_window_s = kEffectiveWindowFactor * plan.window_s;
  }
  if (!doc["scenes"].is_array()) fail("scenes: expected an array");
  for (const Json& s : doc["scenes"]) {
    if (!s.is_object() || !s.contains("shot_ids") || !s["shot_ids"].is_array())
      fail("scene: expected {index, shot_ids, duration, cut_rationale}");
    Scene scene;
    scene.index = s.value("index", static_cast<int>(plan.scenes.size()));
    for (const Json& id : s["shot_ids"]) {
      if (!id.is_string()) fail("shot_ids: expected strings");
      scene.shot_ids.push_back(id.get<std::string>());
    }
    scene.duration_s = s.value("duration", 0.0);
    std::string rationale = s.value("cut_rationale", std::string("capacity"));
    if (rationale == "semantic_breakpoint")
      scene.cut_rationale = CutRationale::SemanticBreakpoint;
    else if (rationale == "fixed_camera")
      scene.cut_rationale = CutRationale::FixedCamera;
    else if (rationale == "capacity")
      scene.cut_rationale = CutRationale::Capacity;
    else
      fail("cut_rationale: unknown value '" + rationale + "'");
    plan.scenes.push_back(std::move(scene));
  }
  return plan;
}

}  // namespace cine
