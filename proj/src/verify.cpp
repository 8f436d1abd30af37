#include "cinescript/verify.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <set>

#include "cinescript/paths.hpp"

namespace cine {

namespace {

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_';
}

std::string lower(const std::string& s) {
  std::string out = s;
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

std::string normalize_whitespace(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  bool in_space = true;  // swallow leading whitespace
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      in_space = true;
      continue;
    }
    if (in_space && !out.empty()) out.push_back(' ');
    in_space = false;
    out.push_back(c);
  }
  return out;
}

double fraction(int violating, int total) {
  if (total == 0) return 1.0;
  return 1.0 - static_cast<double>(violating) / static_cast<double>(total);
}

void finish(CheckResult& result) {
  result.violating_units = static_cast<int>(result.violations.size());
  result.pass_fraction = fraction(result.violating_units, result.total_units);
}

// Attribute values found in `text`, in lexicon order.
std::vector<std::string> values_in_text(const LexiconAttribute& attr,
                                        const std::string& text) {
  std::vector<std::string> found;
  for (const std::string& value : attr.values)
    if (contains_phrase(text, value)) found.push_back(value);
  return found;
}

}  // namespace

bool contains_phrase(const std::string& text, const std::string& phrase) {
  if (phrase.empty()) return false;
  const std::string hay = lower(text);
  const std::string needle = lower(phrase);
  size_t pos = 0;
  while ((pos = hay.find(needle, pos)) != std::string::npos) {
    bool left_ok = pos == 0 || !is_word_char(hay[pos - 1]);
    size_t end = pos + needle.size();
    bool right_ok = end == hay.size() || !is_word_char(hay[end]);
    // Inner boundaries of a multi-word phrase are already exact; only the
    // outer edges need to sit on word boundaries.
    if (left_ok && right_ok) return true;
    ++pos;
  }
  return false;
}

Lexicon Lexicon::from_json(const Json& doc) {
  if (!doc.is_array())
    throw Error(ErrorCode::SchemaError, "lexicon: expected a JSON array");
  Lexicon lex;
  for (size_t i = 0; i < doc.size(); ++i) {
    const Json& entry = doc[i];
    std::string path = "lexicon[" + std::to_string(i) + "]";
    if (!entry.is_object() || !entry.contains("attribute") ||
        !entry.contains("values"))
      throw Error(ErrorCode::SchemaError,
                  path + ": expected {attribute, values}");
    LexiconAttribute attr;
    if (!entry["attribute"].is_string())
      throw Error(ErrorCode::SchemaError, path + ".attribute: expected a string");
    attr.attribute = entry["attribute"].get<std::string>();
    if (!entry["values"].is_array())
      throw Error(ErrorCode::SchemaError, path + ".values: expected an array");
    for (const Json& v : entry["values"]) {
      if (!v.is_string())
        throw Error(ErrorCode::SchemaError, path + ".values: expected strings");
      attr.values.push_back(v.get<std::string>());
    }
    lex.attributes.push_back(std::move(attr));
  }
  return lex;
}

Lexicon Lexicon::load(const std::string& path) {
  Json doc;
  try {
    doc = Json::parse(read_text_file(path));
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::SyntaxError, path + ": " + e.what());
  }
  return from_json(doc);
}

const LexiconAttribute* Lexicon::find(const std::string& attribute) const {
  for (const LexiconAttribute& attr : attributes)
    if (attr.attribute == attribute) return &attr;
  return nullptr;
}

const Lexicon& default_lexicon() {
  static const Lexicon lex = Lexicon::load(default_data_dir() + "/lexicon.json");
  return lex;
}

const char* to_string(CheckName name) {
  switch (name) {
    case CheckName::DialogueCompleteness: return "dialogue_completeness";
    case CheckName::CharacterConsistency: return "character_consistency";
    case CheckName::SceneCoherence: return "scene_coherence";
    case CheckName::PhysicalRationality: return "physical_rationality";
  }
  return "unknown";
}

double VerificationReport::mean_pass_fraction() const {
  double sum = 0.0;
  for (const CheckResult& r : results) sum += r.pass_fraction;
  return sum / 4.0;
}

CheckResult check_dialogue_completeness(const CinematicScript& script) {
  CheckResult result;
  result.check_name = CheckName::DialogueCompleteness;

  std::set<std::string> transcribed;
  for (const Shot& shot : script.shots)
    for (const DialogueLine& line : shot.dialogue)
      if (!line.is_no_dialogue_marker)
        transcribed.insert(normalize_whitespace(line.text));

  for (size_t i = 0; i < script.source_dialogue.size(); ++i) {
    const DialogueLine& line = script.source_dialogue[i];
    ++result.total_units;
    if (!transcribed.contains(normalize_whitespace(line.text)))
      result.violations.push_back(
          {"source_dialogue[" + std::to_string(i) + "]",
           "source line not transcribed in any shot: \"" + line.text + "\""});
  }
  finish(result);
  return result;
}

CheckResult check_character_consistency(const CinematicScript& script,
                                        const Lexicon& lexicon) {
  CheckResult result;
  result.check_name = CheckName::CharacterConsistency;

  for (size_t i = 0; i < script.shots.size(); ++i) {
    const Shot& shot = script.shots[i];
    std::string base = "shots[" + std::to_string(i) + "]";

    // Mention sources, first occurrence wins: speakers, positions, names in
    // the description.
    std::vector<std::pair<std::string, std::string>> mentions;  // id, location
    auto mention = [&](const std::string& id, std::string location) {
      for (const auto& [seen, _] : mentions)
        if (seen == id) return;
      mentions.emplace_back(id, std::move(location));
    };
    for (size_t j = 0; j < shot.dialogue.size(); ++j)
      if (!shot.dialogue[j].speaker_id.empty())
        mention(shot.dialogue[j].speaker_id,
                base + ".dialogue[" + std::to_string(j) + "].speaker");
    for (const auto& [id, _] : shot.positions)
      mention(id, base + ".positions." + id);
    for (const CharacterProfile& c : script.characters)
      if ((!c.name.empty() && contains_phrase(shot.description, c.name)) ||
          contains_phrase(shot.description, c.id))
        mention(c.id, base + ".description");

    for (const auto& [id, location] : mentions) {
      ++result.total_units;
      const CharacterProfile* profile = script.find_character(id);
      if (!profile) {
        result.violations.push_back(
            {location, "undeclared character '" + id + "'"});
        continue;
      }
      // Appearance tokens in the description are attributed to this
      // character only when it is named there, or is the shot's sole
      // mention; otherwise ownership is ambiguous and we stay silent.
      bool attributable =
          mentions.size() == 1 ||
          (!profile->name.empty() &&
           contains_phrase(shot.description, profile->name)) ||
          contains_phrase(shot.description, id);
      if (!attributable) continue;
      for (const LexiconAttribute& attr : lexicon.attributes) {
        if (attr.attribute == "location") continue;
        std::vector<std::string> in_profile =
            values_in_text(attr, profile->appearance);
        if (in_profile.empty()) continue;
        std::vector<std::string> in_description =
            values_in_text(attr, shot.description);
        if (in_description.empty()) continue;
        bool overlap = std::any_of(
            in_description.begin(), in_description.end(),
            [&](const std::string& v) {
              return std::find(in_profile.begin(), in_profile.end(), v) !=
                     in_profile.end();
            });
        if (!overlap) {
          result.violations.push_back(
              {base + ".description",
               "appearance contradiction for '" + id + "': profile " +
                   attr.attribute + " '" + in_profile.front() +
                   "' vs description '" + in_description.front() + "'"});
          break;  // one violation per (shot, character) unit
        }
      }
    }
  }
  finish(result);
  return result;
}

CheckResult check_character_consistency(const CinematicScript& script) {
  return check_character_consistency(script, default_lexicon());
}

CheckResult check_scene_coherence(const CinematicScript& script,
                                  const Lexicon& lexicon) {
  CheckResult result;
  result.check_name = CheckName::SceneCoherence;

  const LexiconAttribute* locations = lexicon.find("location");
  static const LexiconAttribute kEmpty{"location", {}};
  if (!locations) locations = &kEmpty;

  std::vector<std::vector<std::string>> tokens;
  tokens.reserve(script.shots.size());
  for (const Shot& shot : script.shots)
    tokens.push_back(values_in_text(*locations, shot.description));

  for (size_t i = 0; i + 1 < script.shots.size(); ++i) {
    ++result.total_units;
    const auto& prev = tokens[i];
    const auto& next = tokens[i + 1];
    // Token-free descriptions are location-neutral: no evidence of a change.
    if (prev.empty() || next.empty()) continue;
    bool overlap = std::any_of(next.begin(), next.end(),
                               [&](const std::string& v) {
                                 return std::find(prev.begin(), prev.end(),
                                                  v) != prev.end();
                               });
    if (overlap) continue;
    if (script.shots[i].semantic_breakpoint ||
        script.shots[i + 1].semantic_breakpoint)
      continue;
    result.violations.push_back(
        {"shots[" + std::to_string(i + 1) + "].description",
         "location changes from '" + prev.front() + "' to '" + next.front() +
             "' without a scene break"});
  }
  finish(result);
  return result;
}

CheckResult check_scene_coherence(const CinematicScript& script) {
  return check_scene_coherence(script, default_lexicon());
}

CheckResult check_physical_rationality(const CinematicScript& script,
                                       double max_speed) {
  if (!(max_speed > 0.0))
    throw Error(ErrorCode::InvalidConfig, "max_speed must be positive");
  CheckResult result;
  result.check_name = CheckName::PhysicalRationality;

  for (size_t i = 0; i + 1 < script.shots.size(); ++i) {
    const Shot& prev = script.shots[i];
    const Shot& next = script.shots[i + 1];
    double elapsed = next.interval.start_s - prev.interval.end_s;
    for (const auto& [id, from] : prev.positions) {
      auto it = next.positions.find(id);
      if (it == next.positions.end()) continue;
      ++result.total_units;
      const Vec2& to = it->second;
      double displacement = std::hypot(to.x - from.x, to.y - from.y);
      bool teleport = elapsed <= 0.0 && displacement > 0.0;
      bool too_fast = elapsed > 0.0 && displacement / elapsed > max_speed;
      if (teleport || too_fast) {
        char detail[160];
        std::snprintf(detail, sizeof(detail),
                      "'%s' moves %.3g units in %.3g s (max_speed %.3g)",
                      id.c_str(), displacement, elapsed, max_speed);
        result.violations.push_back(
            {"shots[" + std::to_string(i + 1) + "].positions." + id, detail});
      }
    }
  }
  finish(result);
  return result;
}

VerificationReport run_verification(const CinematicScript& script,
                                    const VerifyConfig& config) {
  const Lexicon& lexicon = config.lexicon ? *config.lexicon : default_lexicon();
  VerificationReport report;
  report.results[0] = check_dialogue_completeness(script);
  report.results[1] = check_character_consistency(script, lexicon);
  report.results[2] = check_scene_coherence(script, lexicon);
  report.results[3] = check_physical_rationality(script, config.max_speed);
  report.all_pass = std::all_of(
      report.results.begin(), report.results.end(),
      [](const CheckResult& r) { return r.pass_fraction == 1.0; });
  return report;
}

Json check_result_json(const CheckResult& result) {
  Json out = Json::object();
  out["check_name"] = to_string(result.check_name);
  out["pass_fraction"] = result.pass_fraction;
  out["total_units"] = result.total_units;
  out["violating_units"] = result.violating_units;
  Json violations = Json::array();
  for (const Violation& v : result.violations) {
    Json entry = Json::object();
    entry["location"] = v.location;
    entry["message"] = v.message;
    violations.push_back(std::move(entry));
  }
  out["violations"] = std::move(violations);
  return out;
}

Json report_json(const VerificationReport& report) {
  Json out = Json::object();
  out["all_pass"] = report.all_pass;
  Json results = Json::array();
  for (const CheckResult& r : report.results)
    results.push_back(check_result_json(r));
  out["results"] = std::move(results);
  return out;
}

}  // namespace cine
