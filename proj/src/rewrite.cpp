#include "exrw/rewrite.hpp"

#include <chrono>

namespace exrw {

void RewriteRequest::validate() const {
  if (sentences.empty()) throw RewriteError("rewrite request has no sentences");
  for (const auto& s : sentences) {
    if (s.empty()) throw RewriteError("rewrite request contains an empty sentence");
  }
}

RewriteResult rewrite_identity(const RewriteRequest& request) {
  request.validate();
  RewriteResult result;
  result.source = RewriteSource::identity;
  for (const auto& s : request.sentences) {
    if (!result.text.empty()) result.text.push_back(' ');
    result.text += s;
  }
  return result;
}

RewriteResult IdentityRewriter::rewrite(const RewriteRequest& request) const { return rewrite_identity(request); }

RewriteResult rewrite_remote(const RewriteRequest& request, const RemoteRewriterConfig& config) {
  request.validate();
  const auto start = std::chrono::steady_clock::now();

  nlohmann::json body{{"prompt", request.prompt_tag}, {"sentences", request.sentences}};
  nlohmann::json response;
  try {
    response = post_json(config.endpoint, "/rewrite", body, config.retry);
  } catch (const TransportError& e) {
    throw RewriteError(e.what(), e.status(), e.body_snippet());
  }

  auto it = response.find("text");
  if (it == response.end() || !it->is_string()) throw RewriteError("rewrite response has no text field", 200);
  RewriteResult result;
  result.text = it->get<std::string>();
  if (result.text.empty()) throw RewriteError("empty rewrite", 200);
  result.source = RewriteSource::remote;
  result.latency_ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start)
                          .count();
  return result;
}

RemoteRewriter::RemoteRewriter(RemoteRewriterConfig config)
    : config_(std::move(config)), in_flight_(std::max(1, config_.max_in_flight)) {}

RewriteResult RemoteRewriter::rewrite(const RewriteRequest& request) const {
  in_flight_.acquire();
  struct Release {
    std::counting_semaphore<>& sem;
    ~Release() { sem.release(); }
  } release{in_flight_};
  return rewrite_remote(request, config_);
}

}  // namespace exrw
