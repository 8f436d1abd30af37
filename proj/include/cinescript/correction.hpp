#pragma once

#include <vector>

#include "cinescript/clients.hpp"
#include "cinescript/script.hpp"
#include "cinescript/verify.hpp"

namespace cine {

// Everything the generator needs to draft a script: the dialogue to cover,
// the cast, and the setting.
struct CorrectionContext {
  std::string scene_setting;
  std::vector<CharacterProfile> characters;
  std::vector<DialogueLine> source_dialogue;

  Json to_json() const;
  static CorrectionContext from_json(const Json& doc);
  static CorrectionContext from_script(const CinematicScript& script);
};

struct CorrectionConfig {
  int max_rounds = 5;
  bool keep_best = true;  // fall back to the best-scoring draft on timeout
  ParseOptions parse;
  VerifyConfig verify;
};

struct RoundRecord {
  int round = 0;       // counts from 0
  double score = 0.0;  // verify-module mean pass fraction; 0 for unparseable
  bool parsed = false;
};

struct CorrectionOutcome {
  CinematicScript final_script;
  VerificationReport final_report;
  int rounds_used = 0;
  bool converged = false;  // true iff final_report.all_pass
  std::vector<RoundRecord> round_history;
};

// Draft -> verify -> feedback loop.  Stops early once every check passes;
// otherwise runs max_rounds rounds and returns the best (or last) parseable
// draft.  A draft that fails to parse consumes its round with score 0 and
// feeds the parse error back to the generator.  Generator transport failure
// raises GeneratorError with the round index in detail().
CorrectionOutcome correction_loop(const CorrectionContext& context,
                                  GeneratorClient& generator,
                                  const CorrectionConfig& config = {});

Json outcome_json(const CorrectionOutcome& outcome);

}  // namespace cine
