// cinescript: command-line front end over the shared library's C API.
//
// Every subcommand prints a JSON artifact on stdout and, on failure, a
// machine-readable error object on stderr.  Exit codes: 0 success,
// 1 validation failure, 2 service or protocol failure, 3 usage error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cinescript/capi.h"

namespace {

using Json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitService = 2;
constexpr int kExitUsage = 3;

int exit_class(int code) {
  switch (code) {
    case CINE_OK:
      return kExitOk;
    case CINE_E_USAGE:
    case CINE_E_INVALID_CONFIG:
      return kExitUsage;
    case CINE_E_SERVICE:
    case CINE_E_PROTOCOL:
    case CINE_E_GENERATOR:
    case CINE_E_VIDEO_GEN:
    case CINE_E_MEDIA:
      return kExitService;
    default:
      return kExitValidation;
  }
}

void print_error_json(int code, const std::string& message, long detail) {
  Json err = Json::object();
  err["code"] = code;
  err["name"] = cine_error_name(code);
  err["message"] = message;
  if (detail >= 0)
    err["detail"] = detail;
  else
    err["detail"] = nullptr;
  std::cerr << Json{{"error", std::move(err)}}.dump(2) << "\n";
}

// Reports the C API's last error and returns the exit code for it.
int report_last_error(int code) {
  print_error_json(code, cine_last_error_message(), cine_last_error_detail());
  return exit_class(code);
}

int usage_error(const std::string& message) {
  print_error_json(CINE_E_USAGE, message, -1);
  return kExitUsage;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw std::runtime_error("read failed for " + path);
  return buf.str();
}

// Owns a string returned by the C API.
struct CStr {
  char* p = nullptr;
  ~CStr() { cine_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

struct CtxGuard {
  cine_ctx* ctx = nullptr;
  ~CtxGuard() { cine_ctx_free(ctx); }
};

struct Options {
  std::string config_path;
  bool mock_services = false;
  std::optional<long> seed_clock;
  std::optional<double> max_shot_seconds;
  std::optional<double> max_speed;
  std::optional<double> alpha;
  std::string data_dir;

  // validate / plan / direct / reward / vsa inputs
  std::string script_file;
  std::string plan_file;
  std::string context_file;
  std::string items_file;
  std::string embeddings_file;
  std::string eval_mode;

  std::optional<int> max_rounds;
  std::optional<double> window;
  std::optional<double> human_score;
  std::string preference_endpoint;
  std::vector<double> group;
  std::string rubric;
  std::string transcript_out;
};

// Defaults <- config file (--config or CINE_CONFIG) <- command-line flags.
Json compose_config(const Options& opt) {
  Json config = Json::object();
  std::string path = opt.config_path;
  if (path.empty())
    if (const char* env = std::getenv("CINE_CONFIG"); env && *env) path = env;
  if (!path.empty()) {
    config = Json::parse(read_file(path));
    if (!config.is_object())
      throw std::runtime_error("config file must hold a JSON object");
  }
  if (opt.max_shot_seconds) config["max_shot_seconds"] = *opt.max_shot_seconds;
  if (opt.max_speed) config["max_speed"] = *opt.max_speed;
  if (opt.alpha) config["alpha"] = *opt.alpha;
  if (opt.max_rounds) config["max_rounds"] = *opt.max_rounds;
  if (opt.window) config["window_s"] = *opt.window;
  if (!opt.data_dir.empty()) config["data_dir"] = opt.data_dir;
  if (!opt.preference_endpoint.empty()) {
    if (!config.contains("endpoints")) config["endpoints"] = Json::object();
    config["endpoints"]["preference"] = opt.preference_endpoint;
  }
  return config;
}

int run_command(const std::string& command, const Options& opt) {
  Json config;
  try {
    config = compose_config(opt);
  } catch (const std::exception& e) {
    print_error_json(CINE_E_INVALID_CONFIG, e.what(), -1);
    return kExitUsage;
  }

  CtxGuard ctx;
  if (int rc = cine_ctx_create(config.dump().c_str(), &ctx.ctx))
    return report_last_error(rc);
  if (opt.seed_clock) cine_ctx_seed_clock(ctx.ctx, *opt.seed_clock);
  if (opt.mock_services)
    if (int rc = cine_ctx_enable_mock_services(ctx.ctx, nullptr))
      return report_last_error(rc);

  auto load = [](const std::string& path, std::string& out) {
    try {
      out = read_file(path);
      return true;
    } catch (const std::exception& e) {
      print_error_json(CINE_E_IO, e.what(), -1);
      return false;
    }
  };

  if (command == "validate") {
    std::string text;
    if (!load(opt.script_file, text)) return kExitValidation;
    CStr out;
    if (int rc = cine_cmd_validate(ctx.ctx, text.c_str(), &out.p))
      return report_last_error(rc);
    std::cout << out.str();
    return Json::parse(out.str()).at("all_pass").get<bool>() ? kExitOk
                                                             : kExitValidation;
  }

  if (command == "correct") {
    std::string text;
    if (!load(opt.context_file, text)) return kExitValidation;
    CStr out;
    if (int rc = cine_cmd_correct(ctx.ctx, text.c_str(), &out.p))
      return report_last_error(rc);
    std::cout << out.str();
    return Json::parse(out.str()).at("converged").get<bool>()
               ? kExitOk
               : kExitValidation;
  }

  if (command == "plan") {
    std::string text;
    if (!load(opt.script_file, text)) return kExitValidation;
    CStr out;
    if (int rc = cine_cmd_plan(ctx.ctx, text.c_str(),
                               opt.window.value_or(0.0), &out.p))
      return report_last_error(rc);
    std::cout << out.str();
    return kExitOk;
  }

  if (command == "direct") {
    std::string script_text, plan_text;
    if (!load(opt.script_file, script_text)) return kExitValidation;
    if (!load(opt.plan_file, plan_text)) return kExitValidation;
    CStr out;
    if (int rc = cine_cmd_direct(ctx.ctx, script_text.c_str(),
                                 plan_text.c_str(), &out.p))
      return report_last_error(rc);
    std::cout << out.str();
    if (!opt.transcript_out.empty()) {
      if (!opt.mock_services)
        return usage_error("--transcript-out requires --mock-services");
      CStr transcript;
      if (int rc = cine_ctx_mock_transcript(ctx.ctx, &transcript.p))
        return report_last_error(rc);
      std::ofstream f(opt.transcript_out, std::ios::binary);
      f << transcript.str();
      if (!f) {
        print_error_json(CINE_E_IO, "cannot write " + opt.transcript_out, -1);
        return kExitValidation;
      }
    }
    Json artifact = Json::parse(out.str());
    if (!artifact.at("complete").get<bool>()) {
      std::cerr << Json{{"error", artifact.at("error")}}.dump(2) << "\n";
      return kExitService;
    }
    return kExitOk;
  }

  if (command == "reward") {
    if (!opt.group.empty()) {
      CStr out;
      if (int rc = cine_cmd_reward_group(ctx.ctx, opt.group.data(),
                                         opt.group.size(), &out.p))
        return report_last_error(rc);
      std::cout << out.str();
      return kExitOk;
    }
    if (opt.script_file.empty())
      return usage_error("reward needs a script file or --group");
    std::string text;
    if (!load(opt.script_file, text)) return kExitValidation;
    CStr out;
    if (int rc = cine_cmd_reward(ctx.ctx, text.c_str(),
                                 opt.human_score.value_or(-1.0), &out.p))
      return report_last_error(rc);
    std::cout << out.str();
    return kExitOk;
  }

  if (command == "evaluate") {
    std::string rubric = opt.rubric;
    if (rubric.empty())
      rubric = opt.eval_mode == "script" ? "script_eval" : "video_eval";
    const bool script_rubric = rubric == "script_eval";
    if (opt.eval_mode == "script" && !script_rubric)
      return usage_error("rubric '" + rubric + "' does not evaluate scripts");
    if (opt.eval_mode == "video" && script_rubric)
      return usage_error("rubric 'script_eval' does not evaluate videos");
    std::string text;
    if (!load(opt.items_file, text)) return kExitValidation;
    CStr out;
    if (int rc =
            cine_cmd_evaluate(ctx.ctx, rubric.c_str(), text.c_str(), &out.p))
      return report_last_error(rc);
    std::cout << out.str();
    return Json::parse(out.str()).at("failures").empty() ? kExitOk
                                                         : kExitService;
  }

  if (command == "vsa") {
    std::string script_text, series_text;
    if (!load(opt.script_file, script_text)) return kExitValidation;
    if (!load(opt.embeddings_file, series_text)) return kExitValidation;
    CStr out;
    if (int rc = cine_cmd_vsa(ctx.ctx, script_text.c_str(),
                              series_text.c_str(), &out.p))
      return report_last_error(rc);
    std::cout << out.str();
    return kExitOk;
  }

  return usage_error("unknown command '" + command + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shot-level script validation, scene planning, video-generation "
               "orchestration, and evaluation"};
  app.set_version_flag("--version", cine_version());
  app.require_subcommand(1);

  Options opt;
  app.add_option("--config", opt.config_path,
                 "Config file (JSON); overrides the CINE_CONFIG env var");
  app.add_flag("--mock-services", opt.mock_services,
               "Route every service to in-process mocks");
  app.add_option("--seed-clock", opt.seed_clock,
                 "Fix the clock; retry waits complete immediately");
  app.add_option("--max-shot-seconds", opt.max_shot_seconds,
                 "Per-shot duration cap");
  app.add_option("--max-speed", opt.max_speed,
                 "Character speed limit for physical checks");
  app.add_option("--data-dir", opt.data_dir,
                 "Directory holding lexicon and prompt templates");

  CLI::App* validate =
      app.add_subcommand("validate", "Structural and semantic checks");
  validate->add_option("script", opt.script_file, "Script JSON file")
      ->required();

  CLI::App* correct =
      app.add_subcommand("correct", "Generate-verify-correct loop");
  correct->add_option("context", opt.context_file, "Context JSON file")
      ->required();
  correct->add_option("--max-rounds", opt.max_rounds, "Correction-round cap");

  CLI::App* plan = app.add_subcommand("plan", "Split shots into scenes");
  plan->add_option("script", opt.script_file, "Script JSON file")->required();
  plan->add_option("--window", opt.window, "Generation window in seconds");

  CLI::App* direct =
      app.add_subcommand("direct", "Render a plan with anchored continuity");
  direct->add_option("script", opt.script_file, "Script JSON file")->required();
  direct->add_option("plan", opt.plan_file, "Plan JSON file")->required();
  direct->add_option("--transcript-out", opt.transcript_out,
                     "Write the mock-service transcript to this file");

  CLI::App* reward = app.add_subcommand("reward", "Hybrid reward math");
  reward->add_option("script", opt.script_file, "Script JSON file");
  reward->add_option("--human-score", opt.human_score,
                     "Preference score in [0,1]; skips the service");
  reward->add_option("--preference-endpoint", opt.preference_endpoint,
                     "Preference service base URL");
  reward->add_option("--group", opt.group, "Reward group r1,...,rK")
      ->delimiter(',');
  reward->add_option("--alpha", opt.alpha, "Structural weight in [0,1]");

  CLI::App* evaluate =
      app.add_subcommand("evaluate", "Rubric-guided judge scoring");
  evaluate
      ->add_option("mode", opt.eval_mode, "What the items hold: script|video")
      ->required()
      ->check(CLI::IsMember({"script", "video"}));
  evaluate->add_option("items", opt.items_file, "Slot-object JSON file")
      ->required();
  evaluate->add_option("--rubric", opt.rubric,
                       "script_eval | video_eval | video_cinematic");

  CLI::App* vsa = app.add_subcommand("vsa", "Visual-script alignment score");
  vsa->add_option("script", opt.script_file, "Script JSON file")->required();
  vsa->add_option("embeddings", opt.embeddings_file,
                  "Embedding series (JSONL)")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    std::cout << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    std::cout << cine_version() << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    return usage_error(e.what());
  }

  for (CLI::App* sub : {validate, correct, plan, direct, reward, evaluate, vsa})
    if (sub->parsed()) return run_command(sub->get_name(), opt);
  return usage_error("no command given");
}
