#pragma once

#include <string>
#include <vector>

#include "cinescript/json.hpp"
#include "cinescript/script.hpp"

namespace cine {

// Fraction of the generation window usable after the safety buffer.
inline constexpr double kEffectiveWindowFactor = 0.9;
// Slack for capacity comparisons, absorbing float accumulation.
inline constexpr double kCapacityTolerance = 1e-9;

enum class CutRationale { SemanticBreakpoint, FixedCamera, Capacity };
const char* to_string(CutRationale r);

struct Scene {
  int index = 0;
  std::vector<std::string> shot_ids;  // contiguous slice of the script order
  double duration_s = 0.0;            // sum of member shot durations
  CutRationale cut_rationale = CutRationale::Capacity;
};

struct ScenePlan {
  std::vector<Scene> scenes;
  double window_s = 0.0;
  double effective_window_s = 0.0;  // kEffectiveWindowFactor * window_s
};

struct ConstraintViolation {
  std::string shot_id;
  std::string reason;
};

struct ConstraintReport {
  std::vector<ConstraintViolation> violations;
  bool compliant() const { return violations.empty(); }
};

// Flags every shot strictly longer than max_shot_seconds.
ConstraintReport validate_shot_constraints(const CinematicScript& script,
                                           double max_shot_seconds);

// Greedy left-to-right packing into scenes of at most 0.9 * window_s
// seconds.  When a cut is forced, the planner pulls it back to the latest
// boundary whose ending shot has semantic_breakpoint (first choice) or a
// fixed camera (second choice), provided doing so cannot increase the total
// scene count; otherwise the cut stays at the capacity boundary.
ScenePlan segment_scenes(const CinematicScript& script, double window_s);

// Ranking used when comparing equally sized plans: each inter-scene cut
// scores 2 after a semantic-breakpoint shot, 1 after a fixed-camera shot.
int plan_preference_score(const CinematicScript& script, const ScenePlan& plan);

Json plan_json(const ScenePlan& plan);
ScenePlan plan_from_json(const Json& doc);

}  // namespace cine
