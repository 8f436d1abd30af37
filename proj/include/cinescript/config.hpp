#pragma once

#include <string>

#include "cinescript/http.hpp"
#include "cinescript/json.hpp"

namespace cine {

struct RetryConfig {
  int http_attempts = 3;
  double backoff_base_s = 1.0;
  double backoff_factor = 2.0;
  int judge_retries = 2;  // extra judge calls after a failed parse
};

// One configuration document for the whole pipeline.  File values override
// these defaults; command-line flags override the file.
struct PipelineConfig {
  double alpha = 0.4;            // structural weight in the hybrid reward
  double beta = 0.04;            // KL coefficient
  int group_size = 8;            // K candidates per group
  double epsilon = 1e-8;         // advantage-normalization stabilizer
  double max_shot_seconds = 10.0;
  double window_s = 10.0;        // video-generation window
  int max_rounds = 5;            // correction-loop bound
  double max_speed = 5.0;        // diagram-units per second
  bool keep_best = true;
  int max_in_flight = 4;
  std::string rubric = "script_eval";
  ServiceEndpoints endpoints;    // empty = not configured
  RetryConfig retry;
  std::string data_dir;          // empty = library default

  // Applies recognized keys from a JSON object over the current values.
  // Unknown keys raise InvalidConfig, as do out-of-domain values.
  void apply(const Json& doc);
  void validate() const;

  static PipelineConfig load_file(const std::string& path);
  // CINE_CONFIG (or explicit path) over defaults; missing env -> defaults.
  static PipelineConfig from_environment();

  Json to_json() const;
};

}  // namespace cine
