#include "cinescript/services.hpp"

#include <semaphore>

#include "cinescript/errors.hpp"

namespace cine {

namespace {

const Json& expect_field(const Json& response, const char* key,
                         const char* path) {
  if (!response.is_object() || !response.contains(key))
    throw Error(ErrorCode::ProtocolError,
                std::string(path) + ": response missing '" + key + "'");
  return response[key];
}

std::string expect_string(const Json& response, const char* key,
                          const char* path) {
  const Json& v = expect_field(response, key, path);
  if (!v.is_string())
    throw Error(ErrorCode::ProtocolError,
                std::string(path) + ": '" + key + "' is not a string");
  return v.get<std::string>();
}

double expect_number(const Json& response, const char* key, const char* path) {
  const Json& v = expect_field(response, key, path);
  if (!v.is_number())
    throw Error(ErrorCode::ProtocolError,
                std::string(path) + ": '" + key + "' is not a number");
  return v.get<double>();
}

}  // namespace

HttpGeneratorClient::HttpGeneratorClient(std::string base_url,
                                         HttpRetryPolicy policy)
    : http_(std::move(base_url), policy) {}

std::string HttpGeneratorClient::generate_script(
    const Json& context, const std::vector<Violation>& feedback, int round) {
  Json body = Json::object();
  body["context"] = context;
  Json items = Json::array();
  for (const Violation& v : feedback) {
    Json item = Json::object();
    item["location"] = v.location;
    item["message"] = v.message;
    items.push_back(std::move(item));
  }
  body["feedback"] = std::move(items);
  body["round"] = round;
  Json response = http_.post("/v1/generate-script", body);
  return expect_string(response, "script_document", "/v1/generate-script");
}

struct HttpPreferenceClient::Gate {
  std::counting_semaphore<1024> slots;
  explicit Gate(int n) : slots(n) {}
};

HttpPreferenceClient::HttpPreferenceClient(std::string base_url,
                                           HttpRetryPolicy policy,
                                           int max_in_flight)
    : http_(std::move(base_url), policy),
      gate_(std::make_unique<Gate>(std::max(1, max_in_flight))) {}

HttpPreferenceClient::~HttpPreferenceClient() = default;

double HttpPreferenceClient::score(const std::string& script_document) {
  gate_->slots.acquire();
  struct Release {
    Gate* gate;
    ~Release() { gate->slots.release(); }
  } release{gate_.get()};

  Json body = Json::object();
  body["script_document"] = script_document;
  Json response = http_.post("/v1/score", body);
  double score = expect_number(response, "score", "/v1/score");
  if (!(score >= 0.0 && score <= 1.0))
    throw Error(ErrorCode::ProtocolError,
                "/v1/score: score " + std::to_string(score) +
                    " outside [0, 1]");
  return score;
}

HttpVideoGenClient::HttpVideoGenClient(std::string base_url,
                                       HttpRetryPolicy policy)
    : http_(std::move(base_url), policy) {}

ClipResponse HttpVideoGenClient::generate(
    const std::string& prompt, double duration_s,
    const std::optional<std::string>& anchor_uri) {
  Json body = Json::object();
  body["prompt"] = prompt;
  body["duration_s"] = duration_s;
  if (anchor_uri)
    body["anchor_uri"] = *anchor_uri;
  else
    body["anchor_uri"] = nullptr;
  Json response = http_.post("/v1/generate-video", body);
  ClipResponse clip;
  clip.clip_uri = expect_string(response, "clip_uri", "/v1/generate-video");
  clip.duration_s = expect_number(response, "duration_s", "/v1/generate-video");
  return clip;
}

HttpMediaClient::HttpMediaClient(std::string base_url, HttpRetryPolicy policy)
    : http_(std::move(base_url), policy) {}

std::string HttpMediaClient::extract_frame(const std::string& clip_uri,
                                           const std::string& position) {
  Json body = Json::object();
  body["clip_uri"] = clip_uri;
  body["position"] = position;
  Json response = http_.post("/v1/extract-frame", body);
  return expect_string(response, "frame_uri", "/v1/extract-frame");
}

HttpLlmClient::HttpLlmClient(std::string base_url, HttpRetryPolicy policy)
    : http_(std::move(base_url), policy) {}

std::string HttpLlmClient::complete(const std::string& prompt, int max_tokens) {
  Json body = Json::object();
  body["prompt"] = prompt;
  body["max_tokens"] = max_tokens;
  Json response = http_.post("/v1/complete", body);
  return expect_string(response, "text", "/v1/complete");
}

HttpEmbedClient::HttpEmbedClient(std::string base_url, HttpRetryPolicy policy)
    : http_(std::move(base_url), policy) {}

std::vector<double> HttpEmbedClient::embed(const std::string& kind,
                                           const std::string& payload) {
  Json body = Json::object();
  body["kind"] = kind;
  body["payload"] = payload;
  Json response = http_.post("/v1/embed", body);
  const Json& e = expect_field(response, "e", "/v1/embed");
  if (!e.is_array() || e.empty())
    throw Error(ErrorCode::ProtocolError, "/v1/embed: 'e' is not a non-empty array");
  std::vector<double> out;
  out.reserve(e.size());
  for (const Json& x : e) {
    if (!x.is_number())
      throw Error(ErrorCode::ProtocolError, "/v1/embed: 'e' must hold numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

}  // namespace cine
