#pragma once

#include <array>
#include <string>
#include <vector>

#include "cinescript/json.hpp"
#include "cinescript/script.hpp"

namespace cine {

// Controlled attribute vocabulary used for appearance-contradiction and
// location-change detection.  Deliberately not NLP: a value matches only as
// a whole word/phrase, case-insensitively.  The "location" attribute doubles
// as the scene-coherence vocabulary.
struct LexiconAttribute {
  std::string attribute;
  std::vector<std::string> values;
};

struct Lexicon {
  std::vector<LexiconAttribute> attributes;

  static Lexicon from_json(const Json& doc);
  static Lexicon load(const std::string& path);  // IoError / SchemaError
  const LexiconAttribute* find(const std::string& attribute) const;
};

// Lexicon shipped with the library (<data_dir>/lexicon.json), loaded once.
const Lexicon& default_lexicon();

// True when `phrase` occurs in `text` as a whole word or word sequence,
// ignoring case.  Hyphenated words count as single words.
bool contains_phrase(const std::string& text, const std::string& phrase);

enum class CheckName {
  DialogueCompleteness,
  CharacterConsistency,
  SceneCoherence,
  PhysicalRationality,
};

const char* to_string(CheckName name);

struct Violation {
  std::string location;  // field path, e.g. "shots[2].positions.npc_7"
  std::string message;
  friend bool operator==(const Violation&, const Violation&) = default;
};

struct CheckResult {
  CheckName check_name{};
  double pass_fraction = 1.0;  // 1 - violating_units / total_units
  int total_units = 0;
  int violating_units = 0;
  std::vector<Violation> violations;
};

struct VerificationReport {
  // Fixed order: dialogue, character, scene, physical.
  std::array<CheckResult, 4> results;
  bool all_pass = false;

  double mean_pass_fraction() const;
};

// Every source dialogue line must appear verbatim (whitespace-normalized) in
// some shot's dialogue.  Marker-only shots contribute no candidate lines.
CheckResult check_dialogue_completeness(const CinematicScript& script);

// Unit = (shot, mentioned character).  A character is mentioned by speaking,
// by appearing in positions, or by name/id in the description.  Violations:
// undeclared ids, and appearance-token contradictions against the profile.
CheckResult check_character_consistency(const CinematicScript& script,
                                        const Lexicon& lexicon);
CheckResult check_character_consistency(const CinematicScript& script);

// Unit = adjacent shot pair.  A pair whose descriptions name disjoint
// location tokens needs a semantic_breakpoint on either shot.
CheckResult check_scene_coherence(const CinematicScript& script,
                                  const Lexicon& lexicon);
CheckResult check_scene_coherence(const CinematicScript& script);

// Unit = (adjacent shot pair, character positioned in both).  Movement rate
// above max_speed — or any movement across a zero-length gap — is flagged.
CheckResult check_physical_rationality(const CinematicScript& script,
                                       double max_speed);

struct VerifyConfig {
  double max_speed = 5.0;  // diagram-units per second
  const Lexicon* lexicon = nullptr;  // nullptr -> default_lexicon()
};

VerificationReport run_verification(const CinematicScript& script,
                                    const VerifyConfig& config = {});

Json check_result_json(const CheckResult& result);
Json report_json(const VerificationReport& report);

}  // namespace cine
