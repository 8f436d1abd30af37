#include "cinescript/config.hpp"

#include <cmath>
#include <cstdlib>

#include "cinescript/errors.hpp"
#include "cinescript/paths.hpp"

namespace cine {

namespace {

double as_number(const Json& v, const std::string& key) {
  if (!v.is_number())
    throw Error(ErrorCode::InvalidConfig, key + ": expected a number");
  return v.get<double>();
}

int as_int(const Json& v, const std::string& key) {
  if (!v.is_number_integer())
    throw Error(ErrorCode::InvalidConfig, key + ": expected an integer");
  return v.get<int>();
}

bool as_bool(const Json& v, const std::string& key) {
  if (!v.is_boolean())
    throw Error(ErrorCode::InvalidConfig, key + ": expected a boolean");
  return v.get<bool>();
}

std::string as_string(const Json& v, const std::string& key) {
  if (!v.is_string())
    throw Error(ErrorCode::InvalidConfig, key + ": expected a string");
  return v.get<std::string>();
}

}  // namespace

void PipelineConfig::apply(const Json& doc) {
  if (!doc.is_object())
    throw Error(ErrorCode::InvalidConfig, "config: expected a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (key == "alpha")
      alpha = as_number(value, key);
    else if (key == "beta")
      beta = as_number(value, key);
    else if (key == "group_size")
      group_size = as_int(value, key);
    else if (key == "epsilon")
      epsilon = as_number(value, key);
    else if (key == "max_shot_seconds")
      max_shot_seconds = as_number(value, key);
    else if (key == "window_s")
      window_s = as_number(value, key);
    else if (key == "max_rounds")
      max_rounds = as_int(value, key);
    else if (key == "max_speed")
      max_speed = as_number(value, key);
    else if (key == "keep_best")
      keep_best = as_bool(value, key);
    else if (key == "max_in_flight")
      max_in_flight = as_int(value, key);
    else if (key == "rubric")
      rubric = as_string(value, key);
    else if (key == "data_dir")
      data_dir = as_string(value, key);
    else if (key == "endpoints") {
      if (!value.is_object())
        throw Error(ErrorCode::InvalidConfig, "endpoints: expected an object");
      for (const auto& [service, url] : value.items()) {
        std::string u = as_string(url, "endpoints." + service);
        if (service == "generator")
          endpoints.generator = u;
        else if (service == "preference")
          endpoints.preference = u;
        else if (service == "videogen")
          endpoints.videogen = u;
        else if (service == "media")
          endpoints.media = u;
        else if (service == "embed")
          endpoints.embed = u;
        else if (service == "judge")
          endpoints.judge = u;
        else
          throw Error(ErrorCode::InvalidConfig,
                      "endpoints: unknown service '" + service + "'");
      }
    } else if (key == "retry") {
      if (!value.is_object())
        throw Error(ErrorCode::InvalidConfig, "retry: expected an object");
      for (const auto& [name, v] : value.items()) {
        if (name == "http_attempts")
          retry.http_attempts = as_int(v, "retry." + name);
        else if (name == "backoff_base_s")
          retry.backoff_base_s = as_number(v, "retry." + name);
        else if (name == "backoff_factor")
          retry.backoff_factor = as_number(v, "retry." + name);
        else if (name == "judge_retries")
          retry.judge_retries = as_int(v, "retry." + name);
        else
          throw Error(ErrorCode::InvalidConfig,
                      "retry: unknown field '" + name + "'");
      }
    } else {
      throw Error(ErrorCode::InvalidConfig, "config: unknown key '" + key + "'");
    }
  }
  validate();
}

void PipelineConfig::validate() const {
  auto check = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::InvalidConfig, what);
  };
  check(alpha >= 0.0 && alpha <= 1.0, "alpha must lie in [0, 1]");
  check(std::isfinite(beta), "beta must be finite");
  check(group_size >= 2, "group_size must be at least 2");
  check(epsilon >= 0.0, "epsilon must be non-negative");
  check(max_shot_seconds > 0.0, "max_shot_seconds must be positive");
  check(window_s > 0.0, "window_s must be positive");
  check(max_rounds >= 1, "max_rounds must be at least 1");
  check(max_speed > 0.0, "max_speed must be positive");
  check(max_in_flight >= 1, "max_in_flight must be at least 1");
  check(retry.http_attempts >= 1, "retry.http_attempts must be at least 1");
  check(retry.backoff_base_s >= 0.0, "retry.backoff_base_s must be >= 0");
  check(retry.backoff_factor >= 0.0, "retry.backoff_factor must be >= 0");
  check(retry.judge_retries >= 0, "retry.judge_retries must be >= 0");
}

PipelineConfig PipelineConfig::load_file(const std::string& path) {
  Json doc;
  try {
    doc = Json::parse(read_text_file(path));
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::InvalidConfig,
                path + ": config is not valid JSON: " + e.what());
  }
  PipelineConfig config;
  config.apply(doc);
  return config;
}

PipelineConfig PipelineConfig::from_environment() {
  if (const char* env = std::getenv("CINE_CONFIG"); env && *env)
    return load_file(env);
  return PipelineConfig{};
}

Json PipelineConfig::to_json() const {
  Json endpoints_json = Json::object();
  endpoints_json["generator"] = endpoints.generator;
  endpoints_json["preference"] = endpoints.preference;
  endpoints_json["videogen"] = endpoints.videogen;
  endpoints_json["media"] = endpoints.media;
  endpoints_json["embed"] = endpoints.embed;
  endpoints_json["judge"] = endpoints.judge;

  Json retry_json = Json::object();
  retry_json["http_attempts"] = retry.http_attempts;
  retry_json["backoff_base_s"] = retry.backoff_base_s;
  retry_json["backoff_factor"] = retry.backoff_factor;
  retry_json["judge_retries"] = retry.judge_retries;

  Json out = Json::object();
  out["alpha"] = alpha;
  out["beta"] = beta;
  out["group_size"] = group_size;
  out["epsilon"] = epsilon;
  out["max_shot_seconds"] = max_shot_seconds;
  out["window_s"] = window_s;
  out["max_rounds"] = max_rounds;
  out["max_speed"] = max_speed;
  out["keep_best"] = keep_best;
  out["max_in_flight"] = max_in_flight;
  out["rubric"] = rubric;
  out["endpoints"] = std::move(endpoints_json);
  out["retry"] = std::move(retry_json);
  out["data_dir"] = data_dir;
  return out;
}

}  // namespace cine
