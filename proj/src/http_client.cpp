#include "exrw/http_client.hpp"

#include <algorithm>
#include <thread>

#include "httplib.h"

namespace exrw {

std::chrono::milliseconds RetryPolicy::backoff_total() const {
  std::chrono::milliseconds total{0};
  for (int i = 0; i < retries; ++i) total += base_backoff * (1 << i);
  return total;
}

nlohmann::json post_json(const std::string& endpoint, const std::string& path,
                         const nlohmann::json& body, const RetryPolicy& policy) {
  using clock = std::chrono::steady_clock;
  const auto deadline = clock::now() + policy.timeout;
  const auto payload = body.dump();

  int last_status = 0;
  std::string last_body;
  std::string last_error;
  for (int attempt = 0; attempt <= policy.retries; ++attempt) {
    if (attempt > 0) {
      const auto pause = policy.base_backoff * (1 << (attempt - 1));
      if (clock::now() + pause >= deadline) break;
      std::this_thread::sleep_for(pause);
    }
    const auto remaining =
        std::chrono::duration_cast<std::chrono::milliseconds>(deadline - clock::now());
    if (remaining.count() <= 0) break;

    httplib::Client client(endpoint);
    const auto secs = remaining.count() / 1000;
    const auto usecs = (remaining.count() % 1000) * 1000;
    client.set_connection_timeout(secs, usecs);
    client.set_read_timeout(secs, usecs);
    client.set_write_timeout(secs, usecs);

    auto res = client.Post(path, payload, "application/json");
    if (!res) {
      last_status = 0;
      last_body.clear();
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (res->status != 200) {
      last_status = res->status;
      last_body = res->body.substr(0, 200);
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    try {
      return nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::parse_error& e) {
      throw TransportError(endpoint + path + ": invalid JSON response: " + e.what(), res->status,
                           res->body.substr(0, 200));
    }
  }
  throw TransportError(endpoint + path + " failed after retries: " + last_error, last_status,
                       last_body);
}

}  // namespace exrw
