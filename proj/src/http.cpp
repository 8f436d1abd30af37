#include "cinescript/http.hpp"

#include <chrono>
#include <cmath>
#include <thread>

#include <httplib.h>

#include "cinescript/errors.hpp"

namespace cine {

HttpJsonClient::HttpJsonClient(std::string base_url, HttpRetryPolicy policy)
    : base_url_(std::move(base_url)), policy_(policy) {}

Json HttpJsonClient::post(const std::string& path, const Json& body) const {
  const std::string payload = body.dump();
  const int attempts = std::max(1, policy_.max_attempts);
  std::string last_failure;

  for (int attempt = 1; attempt <= attempts; ++attempt) {
    // A fresh connection per call keeps this object safe to share between
    // threads; all current peers are local, so the cost is negligible.
    httplib::Client client(base_url_);
    client.set_connection_timeout(5, 0);
    client.set_read_timeout(30, 0);

    httplib::Result res = client.Post(path, payload, "application/json");
    if (res && res->status < 500) {
      if (res->status != 200)
        throw Error(ErrorCode::ProtocolError,
                    "POST " + path + ": unexpected status " +
                        std::to_string(res->status));
      try {
        return Json::parse(res->body);
      } catch (const Json::parse_error& e) {
        throw Error(ErrorCode::ProtocolError,
                    "POST " + path + ": response is not JSON: " + e.what());
      }
    }
    last_failure = res ? "status " + std::to_string(res->status)
                       : "transport error " +
                             std::to_string(static_cast<int>(res.error()));
    if (attempt < attempts) {
      double delay = policy_.backoff_base_s *
                     std::pow(policy_.backoff_factor, attempt - 1);
      if (delay > 0.0)
        std::this_thread::sleep_for(std::chrono::duration<double>(delay));
    }
  }
  throw Error(ErrorCode::ServiceError,
              "POST " + base_url_ + path + " failed after " +
                  std::to_string(attempts) + " attempts (" + last_failure + ")",
              attempts);
}

}  // namespace cine
