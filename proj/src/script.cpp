#include "cinescript/script.hpp"

#include <cmath>
#include <cstdio>
#include <regex>
#include <set>
#include <sstream>

namespace cine {

namespace {

[[noreturn]] void schema_fail(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::SchemaError, path + ": " + what);
}

const Json* find_key(const Json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

const Json& require(const Json& obj, const std::string& path, const char* key) {
  if (!obj.is_object()) schema_fail(path, "expected an object");
  const Json* v = find_key(obj, key);
  if (!v) schema_fail(path + "." + key, "missing required field");
  return *v;
}

std::string require_string(const Json& obj, const std::string& path,
                           const char* key) {
  const Json& v = require(obj, path, key);
  if (!v.is_string()) schema_fail(path + "." + key, "expected a string");
  return v.get<std::string>();
}

bool optional_bool(const Json& obj, const std::string& path, const char* key,
                   bool fallback) {
  const Json* v = obj.is_object() ? find_key(obj, key) : nullptr;
  if (!v) return fallback;
  if (!v->is_boolean()) schema_fail(path + "." + key, "expected a boolean");
  return v->get<bool>();
}

Vec2 parse_vec2(const Json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    schema_fail(path, "expected [x, y]");
  Vec2 p{v[0].get<double>(), v[1].get<double>()};
  if (!std::isfinite(p.x) || !std::isfinite(p.y))
    schema_fail(path, "non-finite coordinate");
  return p;
}

DialogueLine parse_dialogue_line(const Json& v, const std::string& path) {
  if (!v.is_object()) schema_fail(path, "expected an object");
  DialogueLine line;
  if (const Json* s = find_key(v, "speaker"); s && !s->is_null()) {
    if (!s->is_string()) schema_fail(path + ".speaker", "expected a string");
    line.speaker_id = s->get<std::string>();
  }
  line.text = require_string(v, path, "text");
  line.is_no_dialogue_marker = (line.text == kNoDialogueMarker);
  return line;
}

ShotType shot_type_from_text(const std::string& text, std::string& label) {
  if (text == "wide") return ShotType::Wide;
  if (text == "medium") return ShotType::Medium;
  if (text == "close_up") return ShotType::CloseUp;
  if (text == "panoramic") return ShotType::Panoramic;
  label = text;
  return ShotType::Other;
}

CameraMove movement_from_text(const std::string& text, std::string& label) {
  if (text == "static") return CameraMove::Static;
  if (text == "pan") return CameraMove::Pan;
  if (text == "tilt") return CameraMove::Tilt;
  if (text == "track") return CameraMove::Track;
  if (text == "zoom") return CameraMove::Zoom;
  if (text == "handheld") return CameraMove::Handheld;
  if (text == "crane") return CameraMove::Crane;
  label = text;
  return CameraMove::Other;
}

// One issue stream in document order, split afterwards, so that parse can
// report the first violation and validate can report them all.
struct Issue {
  bool is_missing;
  std::string path;
  std::string reason;
};

void collect_issues(const CinematicScript& script, const ParseOptions& opts,
                    std::vector<Issue>& out, int& fields_checked) {
  auto missing = [&](std::string path) {
    out.push_back({true, std::move(path), "missing"});
  };
  auto bad = [&](std::string path, std::string reason) {
    out.push_back({false, std::move(path), std::move(reason)});
  };
  auto check_line = [&](const DialogueLine& line, const std::string& path) {
    ++fields_checked;
    bool is_marker_text = (line.text == kNoDialogueMarker);
    if (line.is_no_dialogue_marker && !is_marker_text)
      bad(path, "marker flag set but text is not the marker");
    else if (!line.is_no_dialogue_marker && is_marker_text)
      bad(path, "marker text without marker flag");
    else if (line.is_no_dialogue_marker && !line.speaker_id.empty())
      bad(path, "marker line must not name a speaker");
  };

  std::set<std::string> character_ids;
  for (size_t i = 0; i < script.characters.size(); ++i) {
    const CharacterProfile& c = script.characters[i];
    std::string path = "characters[" + std::to_string(i) + "].id";
    ++fields_checked;
    if (c.id.empty())
      missing(path);
    else if (!character_ids.insert(c.id).second)
      bad(path, "duplicate id '" + c.id + "'");
  }

  for (size_t i = 0; i < script.source_dialogue.size(); ++i)
    check_line(script.source_dialogue[i],
               "source_dialogue[" + std::to_string(i) + "]");

  std::set<std::string> shot_ids;
  for (size_t i = 0; i < script.shots.size(); ++i) {
    const Shot& shot = script.shots[i];
    std::string base = "shots[" + std::to_string(i) + "]";

    ++fields_checked;
    if (shot.id.empty())
      missing(base + ".id");
    else if (!shot_ids.insert(shot.id).second)
      bad(base + ".id", "duplicate id '" + shot.id + "'");

    ++fields_checked;
    const TimeInterval& iv = shot.interval;
    if (!std::isfinite(iv.start_s) || !std::isfinite(iv.end_s))
      bad(base + ".interval", "non-finite bound");
    else if (iv.start_s < 0.0)
      bad(base + ".interval", "negative start");
    else if (iv.end_s <= iv.start_s)
      bad(base + ".interval", "end must exceed start");
    else if (iv.duration() > opts.max_shot_seconds) {
      char reason[64];
      std::snprintf(reason, sizeof(reason), "duration exceeds %.6g s",
                    opts.max_shot_seconds);
      bad(base + ".interval", reason);
    }

    if (i > 0) {
      ++fields_checked;
      if (iv.start_s < script.shots[i - 1].interval.end_s)
        bad(base + ".interval", "overlapping intervals");
    }

    ++fields_checked;
    if (shot.camera.shot_type == ShotType::Unspecified)
      missing(base + ".camera.shot_type");
    ++fields_checked;
    if (shot.camera.movement == CameraMove::Unspecified)
      missing(base + ".camera.movement");
    ++fields_checked;
    if (shot.camera.movement == CameraMove::Static &&
        !shot.camera.fixed_position)
      bad(base + ".camera", "static movement requires fixed_camera");

    ++fields_checked;
    if (shot.description.empty()) bad(base + ".description", "empty");

    ++fields_checked;
    bool has_marker = false, has_line = false;
    for (const DialogueLine& line : shot.dialogue)
      (line.is_no_dialogue_marker ? has_marker : has_line) = true;
    if (has_marker && has_line)
      bad(base + ".dialogue", "marker mixed with dialogue lines");

    for (size_t j = 0; j < shot.dialogue.size(); ++j) {
      const DialogueLine& line = shot.dialogue[j];
      std::string path = base + ".dialogue[" + std::to_string(j) + "]";
      check_line(line, path);
      ++fields_checked;
      if (!line.speaker_id.empty() && !character_ids.contains(line.speaker_id))
        bad(path + ".speaker", "undeclared character '" + line.speaker_id + "'");
    }
  }
}

}  // namespace

std::string to_string(ShotType t, const std::string& other_label) {
  switch (t) {
    case ShotType::Unspecified: return "";
    case ShotType::Wide: return "wide";
    case ShotType::Medium: return "medium";
    case ShotType::CloseUp: return "close_up";
    case ShotType::Panoramic: return "panoramic";
    case ShotType::Other: return other_label.empty() ? "other" : other_label;
  }
  return "";
}

std::string to_string(CameraMove m, const std::string& other_label) {
  switch (m) {
    case CameraMove::Unspecified: return "";
    case CameraMove::Static: return "static";
    case CameraMove::Pan: return "pan";
    case CameraMove::Tilt: return "tilt";
    case CameraMove::Track: return "track";
    case CameraMove::Zoom: return "zoom";
    case CameraMove::Handheld: return "handheld";
    case CameraMove::Crane: return "crane";
    case CameraMove::Other: return other_label.empty() ? "other" : other_label;
  }
  return "";
}

const Shot* CinematicScript::find_shot(const std::string& id) const {
  for (const Shot& s : shots)
    if (s.id == id) return &s;
  return nullptr;
}

const CharacterProfile* CinematicScript::find_character(
    const std::string& id) const {
  for (const CharacterProfile& c : characters)
    if (c.id == id) return &c;
  return nullptr;
}

double parse_timestamp(const Json& value) {
  if (value.is_number()) {
    double t = value.get<double>();
    if (!std::isfinite(t))
      throw Error(ErrorCode::SchemaError, "timestamp: non-finite number");
    return t;
  }
  if (value.is_string()) {
    static const std::regex kClock(R"(^(\d+):([0-5]\d):([0-5]\d(?:\.\d+)?)$)");
    std::smatch m;
    const std::string text = value.get<std::string>();
    if (!std::regex_match(text, m, kClock))
      throw Error(ErrorCode::SchemaError,
                  "timestamp: expected seconds or HH:MM:SS, got \"" + text +
                      "\"");
    return std::stod(m[1]) * 3600.0 + std::stod(m[2]) * 60.0 + std::stod(m[3]);
  }
  throw Error(ErrorCode::SchemaError,
              "timestamp: expected a number or a string");
}

CinematicScript decode_script(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::SyntaxError, e.what());
  }
  if (!doc.is_object())
    schema_fail("document", "expected a JSON object");

  CinematicScript script;
  script.scene_setting = require_string(doc, "document", "scene_setting");

  const Json& chars = require(doc, "document", "characters");
  if (!chars.is_array()) schema_fail("characters", "expected an array");
  for (size_t i = 0; i < chars.size(); ++i) {
    std::string path = "characters[" + std::to_string(i) + "]";
    const Json& c = chars[i];
    if (!c.is_object()) schema_fail(path, "expected an object");
    CharacterProfile profile;
    profile.id = require_string(c, path, "id");
    if (const Json* v = find_key(c, "name")) {
      if (!v->is_string()) schema_fail(path + ".name", "expected a string");
      profile.name = v->get<std::string>();
    }
    if (const Json* v = find_key(c, "appearance")) {
      if (!v->is_string()) schema_fail(path + ".appearance", "expected a string");
      profile.appearance = v->get<std::string>();
    }
    if (const Json* v = find_key(c, "initial_position"))
      profile.initial_position = parse_vec2(*v, path + ".initial_position");
    script.characters.push_back(std::move(profile));
  }

  if (const Json* lines = find_key(doc, "source_dialogue")) {
    if (!lines->is_array()) schema_fail("source_dialogue", "expected an array");
    for (size_t i = 0; i < lines->size(); ++i)
      script.source_dialogue.push_back(parse_dialogue_line(
          (*lines)[i], "source_dialogue[" + std::to_string(i) + "]"));
  }

  const Json& shots = require(doc, "document", "shots");
  if (!shots.is_array()) schema_fail("shots", "expected an array");
  for (size_t i = 0; i < shots.size(); ++i) {
    std::string path = "shots[" + std::to_string(i) + "]";
    const Json& s = shots[i];
    if (!s.is_object()) schema_fail(path, "expected an object");
    Shot shot;
    shot.id = require_string(s, path, "id");
    auto timestamp_field = [&](const char* key) {
      try {
        return parse_timestamp(require(s, path, key));
      } catch (const Error& e) {
        std::string msg = e.what();
        // Point generic timestamp complaints at the offending field.
        if (e.code() == ErrorCode::SchemaError && msg.starts_with("timestamp"))
          msg = path + "." + key + msg.substr(std::string("timestamp").size());
        throw Error(e.code(), msg);
      }
    };
    shot.interval.start_s = timestamp_field("start");
    shot.interval.end_s = timestamp_field("end");

    std::string type_text = require_string(s, path, "shot_type");
    if (type_text.empty()) schema_fail(path + ".shot_type", "empty value");
    shot.camera.shot_type =
        shot_type_from_text(type_text, shot.camera.shot_type_label);

    std::string move_text = require_string(s, path, "camera_movement");
    if (move_text.empty())
      schema_fail(path + ".camera_movement", "empty value");
    shot.camera.movement =
        movement_from_text(move_text, shot.camera.movement_label);
    shot.camera.fixed_position = optional_bool(s, path, "fixed_camera", false);

    shot.description = require_string(s, path, "description");

    if (const Json* lines = find_key(s, "dialogue")) {
      if (!lines->is_array()) schema_fail(path + ".dialogue", "expected an array");
      for (size_t j = 0; j < lines->size(); ++j)
        shot.dialogue.push_back(parse_dialogue_line(
            (*lines)[j], path + ".dialogue[" + std::to_string(j) + "]"));
    }

    if (const Json* pos = find_key(s, "positions")) {
      if (!pos->is_object()) schema_fail(path + ".positions", "expected an object");
      for (const auto& [id, coord] : pos->items())
        shot.positions[id] = parse_vec2(coord, path + ".positions." + id);
    }

    shot.semantic_breakpoint =
        optional_bool(s, path, "semantic_breakpoint", false);

    static const std::set<std::string> known_shot_keys = {
        "id",          "start",    "end",       "shot_type",
        "camera_movement", "fixed_camera", "description", "dialogue",
        "positions",   "semantic_breakpoint"};
    for (const auto& [key, value] : s.items())
      if (!known_shot_keys.contains(key)) {
        if (shot.extra.is_null()) shot.extra = Json::object();
        shot.extra[key] = value;
      }

    script.shots.push_back(std::move(shot));
  }

  static const std::set<std::string> known_doc_keys = {
      "scene_setting", "characters", "source_dialogue", "shots"};
  for (const auto& [key, value] : doc.items())
    if (!known_doc_keys.contains(key)) {
      if (script.extra.is_null()) script.extra = Json::object();
      script.extra[key] = value;
    }
  return script;
}

CinematicScript parse_script(const std::string& text,
                             const ParseOptions& opts) {
  CinematicScript script = decode_script(text);
  std::vector<Issue> issues;
  int checked = 0;
  collect_issues(script, opts, issues, checked);
  if (!issues.empty())
    throw Error(ErrorCode::InvariantError,
                issues.front().path + ": " + issues.front().reason);
  return script;
}

Json character_json(const CharacterProfile& c) {
  Json out = Json::object();
  out["id"] = c.id;
  out["name"] = c.name;
  out["appearance"] = c.appearance;
  out["initial_position"] =
      Json::array({c.initial_position.x, c.initial_position.y});
  return out;
}

Json dialogue_json(const DialogueLine& line) {
  Json out = Json::object();
  if (line.speaker_id.empty())
    out["speaker"] = nullptr;
  else
    out["speaker"] = line.speaker_id;
  out["text"] = line.text;
  return out;
}

Json script_json(const CinematicScript& script) {
  Json out = Json::object();
  out["scene_setting"] = script.scene_setting;
  Json chars = Json::array();
  for (const CharacterProfile& c : script.characters)
    chars.push_back(character_json(c));
  out["characters"] = std::move(chars);
  Json lines = Json::array();
  for (const DialogueLine& line : script.source_dialogue)
    lines.push_back(dialogue_json(line));
  out["source_dialogue"] = std::move(lines);

  Json shots = Json::array();
  for (const Shot& shot : script.shots) {
    Json s = Json::object();
    s["id"] = shot.id;
    s["start"] = shot.interval.start_s;
    s["end"] = shot.interval.end_s;
    s["shot_type"] = to_string(shot.camera.shot_type,
                               shot.camera.shot_type_label);
    s["camera_movement"] =
        to_string(shot.camera.movement, shot.camera.movement_label);
    s["fixed_camera"] = shot.camera.fixed_position;
    s["description"] = shot.description;
    Json dia = Json::array();
    for (const DialogueLine& line : shot.dialogue)
      dia.push_back(dialogue_json(line));
    s["dialogue"] = std::move(dia);
    Json pos = Json::object();
    for (const auto& [id, coord] : shot.positions)  // std::map: sorted by id
      pos[id] = Json::array({coord.x, coord.y});
    s["positions"] = std::move(pos);
    s["semantic_breakpoint"] = shot.semantic_breakpoint;
    if (shot.extra.is_object())
      for (const auto& [key, value] : shot.extra.items()) s[key] = value;
    shots.push_back(std::move(s));
  }
  out["shots"] = std::move(shots);
  if (script.extra.is_object())
    for (const auto& [key, value] : script.extra.items()) out[key] = value;
  return out;
}

std::string serialize_script(const CinematicScript& script) {
  return script_json(script).dump(2) + "\n";
}

FormatReport validate_structure(const CinematicScript& script,
                                const ParseOptions& opts) {
  std::vector<Issue> issues;
  FormatReport report;
  collect_issues(script, opts, issues, report.fields_checked);
  for (Issue& issue : issues) {
    if (issue.is_missing)
      report.missing_fields.push_back(std::move(issue.path));
    else
      report.malformed_entries.push_back(
          {std::move(issue.path), std::move(issue.reason)});
  }
  report.is_valid =
      report.missing_fields.empty() && report.malformed_entries.empty();
  return report;
}

Json format_report_json(const FormatReport& report) {
  Json out = Json::object();
  out["is_valid"] = report.is_valid;
  out["fields_checked"] = report.fields_checked;
  out["missing_fields"] = report.missing_fields;
  Json malformed = Json::array();
  for (const FormatIssue& issue : report.malformed_entries) {
    Json entry = Json::object();
    entry["path"] = issue.path;
    entry["reason"] = issue.reason;
    malformed.push_back(std::move(entry));
  }
  out["malformed_entries"] = std::move(malformed);
  return out;
}

}  // namespace cine
