#pragma once

#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "cinescript/http.hpp"
#include "cinescript/json.hpp"

namespace cine {

// Behavior knobs for the in-process mock service suite.
struct MockOptions {
  double preference_score = 0.75;

  // Fault injection for /v1/generate-video: starting with the Nth call
  // (1-based), respond 500 `video_failures` times before recovering.
  int video_fail_from_call = -1;
  int video_failures = std::numeric_limits<int>::max();

  // Scripted outputs, consumed in call order; when exhausted (or empty) the
  // mock synthesizes deterministic responses instead.
  std::vector<std::string> generator_drafts;
  std::vector<std::string> judge_responses;

  int embed_dim = 8;

  // Base for the transcript's monotonic sequence numbers.  The transcript
  // carries no wall-clock timestamps, so equal inputs give equal bytes.
  long seq_base = 1;
};

// One HTTP server (127.0.0.1, ephemeral port) exposing every service
// endpoint the pipeline knows, with deterministic canned behavior and a
// request/response transcript for assertions.
class MockServices {
 public:
  explicit MockServices(MockOptions options = {});
  ~MockServices();

  MockServices(const MockServices&) = delete;
  MockServices& operator=(const MockServices&) = delete;

  void start();  // ServiceError if the socket cannot be bound
  void stop();

  std::string base_url() const;
  ServiceEndpoints endpoints() const;  // every service at base_url()

  Json transcript() const;
  void write_transcript(const std::string& path) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Deterministic toy embedding used by the mock embed endpoint: `dim` values
// in [-1, 1] derived by hashing (kind, payload).  Never the zero vector.
std::vector<double> mock_embedding(const std::string& kind,
                                   const std::string& payload, int dim);

}  // namespace cine
