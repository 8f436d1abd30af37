#pragma once

#include <string>

#include "cinescript/json.hpp"

namespace cine {

struct HttpRetryPolicy {
  int max_attempts = 3;
  double backoff_base_s = 1.0;  // sleep base * factor^(attempt-1) between tries
  double backoff_factor = 2.0;
};

// Base URLs for every external service the pipeline can talk to.
struct ServiceEndpoints {
  std::string generator;
  std::string preference;
  std::string videogen;
  std::string media;
  std::string embed;
  std::string judge;
};

// Minimal JSON-over-POST client.  Transport failures and 5xx responses are
// retried per policy and end in ServiceError (attempt count in detail());
// other non-200 statuses and unparseable bodies raise ProtocolError.
class HttpJsonClient {
 public:
  explicit HttpJsonClient(std::string base_url, HttpRetryPolicy policy = {});

  Json post(const std::string& path, const Json& body) const;
  const std::string& base_url() const { return base_url_; }

 private:
  std::string base_url_;
  HttpRetryPolicy policy_;
};

}  // namespace cine
