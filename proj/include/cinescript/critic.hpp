#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cinescript/clients.hpp"
#include "cinescript/json.hpp"

namespace cine {

// A judging rubric: its dimensions, score constraints, and the mapping from
// logical slot names to the placeholder literals in the prompt template.
struct Rubric {
  std::string name;
  std::vector<std::string> dimensions;
  bool decimals_allowed = false;
  double min_score = 0.0;
  double max_score = 5.0;
  std::vector<std::pair<std::string, std::string>> slots;  // name -> placeholder
  std::string template_file;  // relative to the data directory

  static const Rubric& script_eval();
  static const Rubric& video_eval();
  static const Rubric& video_cinematic();
  static const Rubric& by_name(const std::string& name);  // InvalidConfig
  static const std::vector<const Rubric*>& all();
};

struct Scorecard {
  std::string rubric;
  // Dimension order matches the rubric.
  std::vector<std::pair<std::string, double>> scores;
  std::string raw_response;

  double score_for(const std::string& dimension) const;  // UnknownDimension
};

// Loads the rubric's template and substitutes every slot placeholder.
// Throws MissingSlot when a required slot is absent; extra slots are ignored.
std::string render_prompt(const Rubric& rubric,
                          const std::map<std::string, std::string>& slots);

// Same, with the template text supplied directly (no file access).
std::string render_prompt_with_template(
    const Rubric& rubric, const std::string& template_text,
    const std::map<std::string, std::string>& slots);

// Extracts the first JSON object embedded in `response` (judges often wrap
// it in prose) and validates it against the rubric: exact key set, scores in
// [0,5], integers unless the rubric allows decimals.
Scorecard parse_scorecard(const std::string& response, const Rubric& rubric);

struct FailedItem {
  size_t index = 0;
  std::string error;  // last error message
  int attempts = 0;   // judge calls spent on this item
};

struct EvalOptions {
  int retries = 2;        // extra judge calls after the first failure
  int max_in_flight = 4;  // concurrent items
  int max_tokens = 512;
};

struct EvalRun {
  std::vector<Scorecard> scorecards;  // successes, in item order
  std::vector<FailedItem> failures;   // failures, in item order
};

// Renders, submits, and parses every item.  Parse or transport failures are
// retried with the identical prompt; items still failing after
// retries + 1 calls are reported, never thrown.
EvalRun evaluate(const std::vector<std::map<std::string, std::string>>& items,
                 const Rubric& rubric, LlmClient& judge,
                 const EvalOptions& options = {});

struct EvalSummary {
  std::string rubric;
  std::vector<std::pair<std::string, double>> per_dimension_mean;
  double overall_mean = 0.0;
  int n = 0;
};

// Per-dimension arithmetic means over cards sharing one rubric.
EvalSummary aggregate(const std::vector<Scorecard>& cards);

Json scorecard_json(const Scorecard& card);
Json summary_json(const EvalSummary& summary);

}  // namespace cine
