#include "cinescript/critic.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <optional>
#include <thread>

#include "cinescript/errors.hpp"
#include "cinescript/paths.hpp"

namespace cine {

namespace {

Rubric make_script_eval() {
  Rubric r;
  r.name = "script_eval";
  r.dimensions = {"Format Compliance", "Shot Division Rationality",
                  "Content Completeness", "Narrative Coherence"};
  r.decimals_allowed = false;
  r.slots = {{"source_dialogue", "{Insert Origin Dialogue Here}"},
             {"generated_script", "{Insert Generated JSON Script Here}"}};
  r.template_file = "prompts/script_eval_prompt.txt";
  return r;
}

Rubric make_video_eval() {
  Rubric r;
  r.name = "video_eval";
  r.dimensions = {"Audio-Visual Synchronization", "Emotional Consistency",
                  "Rhythm Coordination", "Voice-Lip Sync"};
  r.decimals_allowed = false;
  r.slots = {{"reference_script", "{Insert Script Text Here}"},
             {"reference_audio_ref", "{Insert Audio File Here}"},
             {"video_ref", "{Insert Video File Here}"}};
  r.template_file = "prompts/video_eval_prompt.txt";
  return r;
}

Rubric make_video_cinematic() {
  Rubric r;
  r.name = "video_cinematic";
  r.dimensions = {"Cinematic Camera Articulation",
                  "Kinetic Body Language & Blocking",
                  "Visual Descriptive Fidelity",
                  "Emotional Arc & Micro-Expressions",
                  "Narrative Pacing & Timing"};
  r.decimals_allowed = true;
  r.slots = {{"reference_script", "{Insert Reference Script Here}"},
             {"video_ref", "{Video File to be Evaluated}"}};
  r.template_file = "prompts/video_cinematic_prompt.txt";
  return r;
}

void replace_all(std::string& text, const std::string& from,
                 const std::string& to) {
  size_t pos = 0;
  while ((pos = text.find(from, pos)) != std::string::npos) {
    text.replace(pos, from.size(), to);
    pos += to.size();
  }
}

// Returns the substring of the first balanced {...} group starting at or
// after `from`, or nullopt.  Brace counting honors JSON string syntax.
std::optional<std::string> balanced_object(const std::string& text,
                                           size_t from, size_t& open_pos) {
  size_t start = text.find('{', from);
  if (start == std::string::npos) return std::nullopt;
  open_pos = start;
  int depth = 0;
  bool in_string = false, escaped = false;
  for (size_t i = start; i < text.size(); ++i) {
    char c = text[i];
    if (in_string) {
      if (escaped)
        escaped = false;
      else if (c == '\\')
        escaped = true;
      else if (c == '"')
        in_string = false;
      continue;
    }
    if (c == '"')
      in_string = true;
    else if (c == '{')
      ++depth;
    else if (c == '}' && --depth == 0)
      return text.substr(start, i - start + 1);
  }
  return std::nullopt;  // unbalanced to the end
}

}  // namespace

const Rubric& Rubric::script_eval() {
  static const Rubric r = make_script_eval();
  return r;
}

const Rubric& Rubric::video_eval() {
  static const Rubric r = make_video_eval();
  return r;
}

const Rubric& Rubric::video_cinematic() {
  static const Rubric r = make_video_cinematic();
  return r;
}

const std::vector<const Rubric*>& Rubric::all() {
  static const std::vector<const Rubric*> rubrics = {
      &script_eval(), &video_eval(), &video_cinematic()};
  return rubrics;
}

const Rubric& Rubric::by_name(const std::string& name) {
  for (const Rubric* r : all())
    if (r->name == name) return *r;
  throw Error(ErrorCode::InvalidConfig, "unknown rubric '" + name + "'");
}

double Scorecard::score_for(const std::string& dimension) const {
  for (const auto& [dim, value] : scores)
    if (dim == dimension) return value;
  throw Error(ErrorCode::UnknownDimension,
              "no score for dimension '" + dimension + "'");
}

std::string render_prompt_with_template(
    const Rubric& rubric, const std::string& template_text,
    const std::map<std::string, std::string>& slots) {
  std::string out = template_text;
  for (const auto& [name, placeholder] : rubric.slots) {
    auto it = slots.find(name);
    if (it == slots.end())
      throw Error(ErrorCode::MissingSlot, "missing slot '" + name + "'");
    replace_all(out, placeholder, it->second);
  }
  return out;
}

std::string render_prompt(const Rubric& rubric,
                          const std::map<std::string, std::string>& slots) {
  static std::mutex mu;
  static std::map<std::string, std::string> cache;  // full path -> text
  const std::string path = default_data_dir() + "/" + rubric.template_file;
  std::string text;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(path);
    if (it == cache.end()) {
      text = read_text_file(path);
      cache[path] = text;
    } else {
      text = it->second;
    }
  }
  return render_prompt_with_template(rubric, text, slots);
}

Scorecard parse_scorecard(const std::string& response, const Rubric& rubric) {
  // Find the first brace group that parses as JSON; prose braces are skipped
  // by restarting just past the group's opening brace.
  Json doc;
  bool found = false;
  size_t from = 0;
  while (!found) {
    size_t open_pos = 0;
    std::optional<std::string> candidate =
        balanced_object(response, from, open_pos);
    if (!candidate) break;
    try {
      doc = Json::parse(*candidate);
      found = true;
    } catch (const Json::parse_error&) {
      from = open_pos + 1;
    }
  }
  if (!found)
    throw Error(ErrorCode::NoJsonFound, "no JSON object in judge response");

  auto known = [&](const std::string& key) {
    return std::find(rubric.dimensions.begin(), rubric.dimensions.end(),
                     key) != rubric.dimensions.end();
  };
  for (const auto& [key, value] : doc.items())
    if (!known(key))
      throw Error(ErrorCode::UnknownDimension, "unexpected key '" + key + "'");
  for (const std::string& dim : rubric.dimensions)
    if (!doc.contains(dim))
      throw Error(ErrorCode::MissingDimension, "missing dimension '" + dim + "'");

  Scorecard card;
  card.rubric = rubric.name;
  card.raw_response = response;
  for (const std::string& dim : rubric.dimensions) {
    const Json& value = doc[dim];
    if (!value.is_number())
      throw Error(ErrorCode::ScoreOutOfRange,
                  "score for '" + dim + "' is not a number");
    double score = value.get<double>();
    if (!(score >= rubric.min_score && score <= rubric.max_score))
      throw Error(ErrorCode::ScoreOutOfRange,
                  "score for '" + dim + "' outside [" +
                      std::to_string(rubric.min_score) + ", " +
                      std::to_string(rubric.max_score) + "]");
    if (!rubric.decimals_allowed && std::floor(score) != score)
      throw Error(ErrorCode::NonIntegerScore,
                  "score for '" + dim + "' must be an integer");
    card.scores.emplace_back(dim, score);
  }
  return card;
}

EvalRun evaluate(const std::vector<std::map<std::string, std::string>>& items,
                 const Rubric& rubric, LlmClient& judge,
                 const EvalOptions& options) {
  struct Slot {
    std::optional<Scorecard> card;
    std::optional<FailedItem> failure;
  };
  std::vector<Slot> results(items.size());

  auto process = [&](size_t index) {
    int attempts = 0;
    std::string last_error;
    try {
      std::string prompt = render_prompt(rubric, items[index]);
      for (int attempt = 0; attempt <= options.retries; ++attempt) {
        ++attempts;
        try {
          std::string text = judge.complete(prompt, options.max_tokens);
          results[index].card = parse_scorecard(text, rubric);
          return;
        } catch (const Error& e) {
          last_error = e.what();
        }
      }
    } catch (const Error& e) {
      // Render errors are not retryable.
      last_error = e.what();
    }
    results[index].failure = FailedItem{index, last_error, attempts};
  };

  int workers = std::max(1, std::min<int>(options.max_in_flight,
                                          static_cast<int>(items.size())));
  if (workers <= 1) {
    for (size_t i = 0; i < items.size(); ++i) process(i);
  } else {
    std::atomic<size_t> cursor{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (size_t i = cursor.fetch_add(1); i < items.size();
             i = cursor.fetch_add(1))
          process(i);
      });
    for (std::thread& t : pool) t.join();
  }

  EvalRun run;
  for (Slot& slot : results) {
    if (slot.card) run.scorecards.push_back(std::move(*slot.card));
    if (slot.failure) run.failures.push_back(std::move(*slot.failure));
  }
  return run;
}

EvalSummary aggregate(const std::vector<Scorecard>& cards) {
  if (cards.empty()) throw Error(ErrorCode::EmptyInput, "no scorecards");
  for (const Scorecard& card : cards)
    if (card.rubric != cards.front().rubric)
      throw Error(ErrorCode::MixedRubrics,
                  "cannot aggregate '" + cards.front().rubric + "' with '" +
                      card.rubric + "'");

  EvalSummary summary;
  summary.rubric = cards.front().rubric;
  summary.n = static_cast<int>(cards.size());
  for (const auto& [dim, _] : cards.front().scores) {
    double sum = 0.0;
    for (const Scorecard& card : cards) sum += card.score_for(dim);
    summary.per_dimension_mean.emplace_back(dim, sum / cards.size());
  }
  double total = 0.0;
  for (const auto& [_, mean] : summary.per_dimension_mean) total += mean;
  summary.overall_mean = total / summary.per_dimension_mean.size();
  return summary;
}

Json scorecard_json(const Scorecard& card) {
  Json scores = Json::object();
  for (const auto& [dim, value] : card.scores) scores[dim] = value;
  Json out = Json::object();
  out["rubric"] = card.rubric;
  out["scores"] = std::move(scores);
  return out;
}

Json summary_json(const EvalSummary& summary) {
  Json means = Json::object();
  for (const auto& [dim, value] : summary.per_dimension_mean)
    means[dim] = value;
  Json out = Json::object();
  out["rubric"] = summary.rubric;
  out["n"] = summary.n;
  out["per_dimension_mean"] = std::move(means);
  out["overall_mean"] = summary.overall_mean;
  return out;
}

}  // namespace cine
