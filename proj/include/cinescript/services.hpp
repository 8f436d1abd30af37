#pragma once

#include <memory>
#include <string>
#include <vector>

#include "cinescript/clients.hpp"
#include "cinescript/http.hpp"

namespace cine {

// HTTP-backed implementations of the abstract service clients.  Each wraps
// one wire endpoint and validates the response shape (ProtocolError on
// violations).

class HttpGeneratorClient : public GeneratorClient {
 public:
  explicit HttpGeneratorClient(std::string base_url, HttpRetryPolicy policy = {});
  std::string generate_script(const Json& context,
                              const std::vector<Violation>& feedback,
                              int round) override;

 private:
  HttpJsonClient http_;
};

class HttpPreferenceClient : public PreferenceClient {
 public:
  explicit HttpPreferenceClient(std::string base_url,
                                HttpRetryPolicy policy = {},
                                int max_in_flight = 4);
  ~HttpPreferenceClient() override;
  // Blocks while max_in_flight requests are already outstanding.
  double score(const std::string& script_document) override;

 private:
  struct Gate;
  HttpJsonClient http_;
  std::unique_ptr<Gate> gate_;
};

class HttpVideoGenClient : public VideoGenClient {
 public:
  explicit HttpVideoGenClient(std::string base_url, HttpRetryPolicy policy = {});
  ClipResponse generate(const std::string& prompt, double duration_s,
                        const std::optional<std::string>& anchor_uri) override;

 private:
  HttpJsonClient http_;
};

class HttpMediaClient : public MediaClient {
 public:
  explicit HttpMediaClient(std::string base_url, HttpRetryPolicy policy = {});
  std::string extract_frame(const std::string& clip_uri,
                            const std::string& position) override;

 private:
  HttpJsonClient http_;
};

class HttpLlmClient : public LlmClient {
 public:
  explicit HttpLlmClient(std::string base_url, HttpRetryPolicy policy = {});
  std::string complete(const std::string& prompt, int max_tokens) override;

 private:
  HttpJsonClient http_;
};

class HttpEmbedClient : public EmbedClient {
 public:
  explicit HttpEmbedClient(std::string base_url, HttpRetryPolicy policy = {});
  std::vector<double> embed(const std::string& kind,
                            const std::string& payload) override;

 private:
  HttpJsonClient http_;
};

}  // namespace cine
