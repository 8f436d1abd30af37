#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cinescript/errors.hpp"
#include "cinescript/json.hpp"

namespace cine {

// Literal a dialogue-free shot must carry in its dialogue list.
inline constexpr std::string_view kNoDialogueMarker = "[No Dialogue]";

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

// Half-open [start_s, end_s) in seconds from the start of the piece.
struct TimeInterval {
  double start_s = 0.0;
  double end_s = 0.0;
  double duration() const { return end_s - start_s; }
  bool contains(double t) const { return t >= start_s && t < end_s; }
  friend bool operator==(const TimeInterval&, const TimeInterval&) = default;
};

enum class ShotType { Unspecified, Wide, Medium, CloseUp, Panoramic, Other };
enum class CameraMove {
  Unspecified,
  Static,
  Pan,
  Tilt,
  Track,
  Zoom,
  Handheld,
  Crane,
  Other
};

std::string to_string(ShotType t, const std::string& other_label = {});
std::string to_string(CameraMove m, const std::string& other_label = {});

struct CameraSpec {
  ShotType shot_type = ShotType::Unspecified;
  std::string shot_type_label;  // original text when shot_type == Other
  CameraMove movement = CameraMove::Unspecified;
  std::string movement_label;  // original text when movement == Other
  bool fixed_position = false;
  friend bool operator==(const CameraSpec&, const CameraSpec&) = default;
};

struct CharacterProfile {
  std::string id;  // unique within a script
  std::string name;
  std::string appearance;  // free text; mined by the consistency check
  Vec2 initial_position;
  friend bool operator==(const CharacterProfile&,
                         const CharacterProfile&) = default;
};

struct DialogueLine {
  std::string speaker_id;  // empty when no speaker is attributed
  std::string text;
  bool is_no_dialogue_marker = false;
  friend bool operator==(const DialogueLine&, const DialogueLine&) = default;
};

struct Shot {
  std::string id;
  TimeInterval interval;
  CameraSpec camera;
  std::string description;  // natural-language staging text, never empty
  std::vector<DialogueLine> dialogue;
  std::map<std::string, Vec2> positions;  // character id -> diagram coordinate
  bool semantic_breakpoint = false;       // preferred cut after this shot
  Json extra;  // unknown document fields, preserved verbatim
  friend bool operator==(const Shot&, const Shot&) = default;
};

struct CinematicScript {
  std::string scene_setting;
  std::vector<CharacterProfile> characters;
  std::vector<DialogueLine> source_dialogue;  // lines the shots must cover
  std::vector<Shot> shots;                    // strictly increasing intervals
  Json extra;

  const Shot* find_shot(const std::string& id) const;
  const CharacterProfile* find_character(const std::string& id) const;
  friend bool operator==(const CinematicScript&,
                         const CinematicScript&) = default;
};

struct ParseOptions {
  double max_shot_seconds = 10.0;
};

struct FormatIssue {
  std::string path;    // e.g. "shots[1].description"
  std::string reason;  // e.g. "empty"
  friend bool operator==(const FormatIssue&, const FormatIssue&) = default;
};

// Outcome of structural validation.  fields_checked counts every field slot
// the validator examined, so (checked - missing - malformed) / checked is a
// meaningful intactness fraction for scoring.
struct FormatReport {
  bool is_valid = true;
  std::vector<std::string> missing_fields;
  std::vector<FormatIssue> malformed_entries;
  int fields_checked = 0;
};

// Parses a script document.  Throws SyntaxError for malformed JSON,
// SchemaError for shape violations, InvariantError for the first violated
// script invariant.  Every script this accepts passes validate_structure.
CinematicScript parse_script(const std::string& text,
                             const ParseOptions& opts = {});

// Schema-only decode: accepts any document whose field shapes fit the IR
// without enforcing script invariants, so validation front ends can produce
// a full report for flawed-but-decodable documents.
// parse_script(text) == decode_script(text) + the invariant gate.
CinematicScript decode_script(const std::string& text);

// Canonical serialization: stable key order, two-space indent, positions
// sorted by character id.  parse(serialize(s)) == s.
std::string serialize_script(const CinematicScript& script);
Json script_json(const CinematicScript& script);

// Non-throwing structural check for scripts built in memory.  Collects every
// problem instead of stopping at the first.
FormatReport validate_structure(const CinematicScript& script,
                                const ParseOptions& opts = {});
Json format_report_json(const FormatReport& report);

// Accepts a JSON number of seconds or an "HH:MM:SS[.fff]" string.
double parse_timestamp(const Json& value);

// Shared serialization pieces (also used for generation-request payloads).
Json character_json(const CharacterProfile& c);
Json dialogue_json(const DialogueLine& line);

}  // namespace cine
