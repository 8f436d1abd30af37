#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cinescript/json.hpp"
#include "cinescript/verify.hpp"

namespace cine {

// Abstract service clients.  Production code talks HTTP (services.hpp);
// tests plug in scripted in-memory fakes.  Implementations signal transient
// failure with ServiceError (detail = attempts) and contract violations with
// ProtocolError; callers decide how to surface those.

class GeneratorClient {
 public:
  virtual ~GeneratorClient() = default;
  // Returns a raw script document (JSON text).  `feedback` carries the
  // violations from the previous round; round counts from 0.
  virtual std::string generate_script(const Json& context,
                                      const std::vector<Violation>& feedback,
                                      int round) = 0;
};

class PreferenceClient {
 public:
  virtual ~PreferenceClient() = default;
  // Scores a script document in [0,1].
  virtual double score(const std::string& script_document) = 0;
};

struct ClipResponse {
  std::string clip_uri;
  double duration_s = 0.0;
};

class VideoGenClient {
 public:
  virtual ~VideoGenClient() = default;
  virtual ClipResponse generate(const std::string& prompt, double duration_s,
                                const std::optional<std::string>& anchor_uri) = 0;
};

class MediaClient {
 public:
  virtual ~MediaClient() = default;
  // `position` is currently always "last".
  virtual std::string extract_frame(const std::string& clip_uri,
                                    const std::string& position) = 0;
};

class LlmClient {
 public:
  virtual ~LlmClient() = default;
  // Must be safe to call from several worker threads at once.
  virtual std::string complete(const std::string& prompt, int max_tokens) = 0;
};

class EmbedClient {
 public:
  virtual ~EmbedClient() = default;
  // kind is "frame", "instruction", or "text".
  virtual std::vector<double> embed(const std::string& kind,
                                    const std::string& payload) = 0;
};

}  // namespace cine
