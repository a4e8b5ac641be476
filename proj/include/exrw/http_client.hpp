#pragma once

#include <chrono>
#include <stdexcept>
#include <string>

#include "json.hpp"

namespace exrw {

struct RetryPolicy {
  int retries = 3;  // attempts after the first one
  std::chrono::milliseconds base_backoff{200};
  std::chrono::milliseconds timeout{30000};  // total budget across attempts

  // Sum of the sleeps between attempts when every attempt fails.
  std::chrono::milliseconds backoff_total() const;
};

/// Raised once retries are exhausted. `status` is 0 for transport failures.
class TransportError : public std::runtime_error {
 public:
  TransportError(const std::string& what, int status, std::string body_snippet)
      : std::runtime_error(what), status_(status), body_(std::move(body_snippet)) {}
  int status() const { return status_; }
  const std::string& body_snippet() const { return body_; }

 private:
  int status_;
  std::string body_;
};

/// POSTs `body` to `endpoint` + `path` and returns the parsed 200 response.
/// Transport failures and non-200 statuses are retried with exponential
/// backoff (base, 2*base, 4*base, ...) until `retries` or the timeout is
/// exhausted.
nlohmann::json post_json(const std::string& endpoint, const std::string& path,
                         const nlohmann::json& body, const RetryPolicy& policy);

}  // namespace exrw
