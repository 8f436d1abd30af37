#include "cinescript/correction.hpp"

#include <utility>

namespace cine {

namespace {

CinematicScript shell_script(const CorrectionContext& context) {
  CinematicScript script;
  script.scene_setting = context.scene_setting;
  script.characters = context.characters;
  script.source_dialogue = context.source_dialogue;
  return script;
}

std::vector<Violation> collect_feedback(const VerificationReport& report) {
  std::vector<Violation> feedback;
  for (const CheckResult& check : report.results)
    feedback.insert(feedback.end(), check.violations.begin(),
                    check.violations.end());
  return feedback;
}

}  // namespace

Json CorrectionContext::to_json() const {
  Json out = Json::object();
  out["scene_setting"] = scene_setting;
  Json chars = Json::array();
  for (const CharacterProfile& c : characters) chars.push_back(character_json(c));
  out["characters"] = std::move(chars);
  Json lines = Json::array();
  for (const DialogueLine& line : source_dialogue)
    lines.push_back(dialogue_json(line));
  out["source_dialogue"] = std::move(lines);
  return out;
}

CorrectionContext CorrectionContext::from_json(const Json& doc) {
  // Reuse the script parser by treating the context as a shot-less script.
  Json shell = doc;
  if (!shell.is_object())
    throw Error(ErrorCode::SchemaError, "context: expected a JSON object");
  shell["shots"] = Json::array();
  CinematicScript script = parse_script(shell.dump());
  return from_script(script);
}

CorrectionContext CorrectionContext::from_script(const CinematicScript& script) {
  return {script.scene_setting, script.characters, script.source_dialogue};
}

CorrectionOutcome correction_loop(const CorrectionContext& context,
                                  GeneratorClient& generator,
                                  const CorrectionConfig& config) {
  if (config.max_rounds < 1)
    throw Error(ErrorCode::InvalidConfig, "max_rounds must be at least 1");

  CorrectionOutcome outcome;
  Json context_json = context.to_json();
  std::vector<Violation> feedback;

  CinematicScript best_script, last_script;
  VerificationReport best_report, last_report;
  double best_score = -1.0;
  bool any_parsed = false;

  for (int round = 0; round < config.max_rounds; ++round) {
    std::string draft;
    try {
      draft = generator.generate_script(context_json, feedback, round);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ServiceError && e.code() != ErrorCode::ProtocolError)
        throw;
      throw Error(ErrorCode::GeneratorError,
                  "generator failed in round " + std::to_string(round) + ": " +
                      e.what(),
                  round);
    }

    CinematicScript script;
    try {
      script = parse_script(draft, config.parse);
    } catch (const Error& e) {
      outcome.round_history.push_back({round, 0.0, false});
      feedback = {{"document", std::string("draft failed to parse: ") + e.what()}};
      continue;
    }

    VerificationReport report = run_verification(script, config.verify);
    double score = report.mean_pass_fraction();
    outcome.round_history.push_back({round, score, true});
    any_parsed = true;
    last_script = script;
    last_report = report;
    if (score > best_score) {  // ties keep the earliest draft
      best_score = score;
      best_script = script;
      best_report = report;
    }

    if (report.all_pass) {
      outcome.final_script = std::move(script);
      outcome.final_report = std::move(report);
      outcome.rounds_used = round + 1;
      outcome.converged = true;
      return outcome;
    }
    feedback = collect_feedback(report);
  }

  outcome.rounds_used = config.max_rounds;
  if (any_parsed) {
    if (config.keep_best) {
      outcome.final_script = std::move(best_script);
      outcome.final_report = std::move(best_report);
    } else {
      outcome.final_script = std::move(last_script);
      outcome.final_report = std::move(last_report);
    }
  } else {
    // Every round was unparseable: fall back to a shot-less shell of the
    // context so callers still get a structurally valid document.
    outcome.final_script = shell_script(context);
    outcome.final_report = run_verification(outcome.final_script, config.verify);
  }
  outcome.converged = outcome.final_report.all_pass;
  return outcome;
}

Json outcome_json(const CorrectionOutcome& outcome) {
  Json out = Json::object();
  out["converged"] = outcome.converged;
  out["rounds_used"] = outcome.rounds_used;
  Json history = Json::array();
  for (const RoundRecord& r : outcome.round_history) {
    Json entry = Json::object();
    entry["round"] = r.round;
    entry["score"] = r.score;
    entry["parsed"] = r.parsed;
    history.push_back(std::move(entry));
  }
  out["round_history"] = std::move(history);
  out["final_report"] = report_json(outcome.final_report);
  out["final_script"] = script_json(outcome.final_script);
  return out;
}

}  // namespace cine
