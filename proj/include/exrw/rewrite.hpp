#pragma once

#include <memory>
#include <semaphore>
#include <stdexcept>
#include <string>
#include <vector>

#include "exrw/http_client.hpp"

namespace exrw {

class RewriteError : public std::runtime_error {
 public:
  explicit RewriteError(const std::string& what, int status = 0, std::string body_snippet = {})
      : std::runtime_error(what), status_(status), body_(std::move(body_snippet)) {}
  int status() const { return status_; }
  const std::string& body_snippet() const { return body_; }

 private:
  int status_;
  std::string body_;
};

struct RewriteRequest {
  std::vector<std::string> sentences;
  std::string prompt_tag = "re-write";

  /// Throws RewriteError when empty or when any sentence is empty.
  void validate() const;
};

enum class RewriteSource { identity, remote };

struct RewriteResult {
  std::string text;
  RewriteSource source = RewriteSource::identity;
  long latency_ms = 0;
};

class Rewriter {
 public:
  virtual ~Rewriter() = default;
  virtual RewriteResult rewrite(const RewriteRequest& request) const = 0;
};

/// Joins the sentences with single spaces.
class IdentityRewriter final : public Rewriter {
 public:
  RewriteResult rewrite(const RewriteRequest& request) const override;
};

struct RemoteRewriterConfig {
  std::string endpoint;
  RetryPolicy retry{};
  int max_in_flight = 4;
};

/// Client for `POST /rewrite {"prompt":...,"sentences":[...]}` -> `{"text":...}`.
class RemoteRewriter final : public Rewriter {
 public:
  explicit RemoteRewriter(RemoteRewriterConfig config);
  RewriteResult rewrite(const RewriteRequest& request) const override;

 private:
  RemoteRewriterConfig config_;
  mutable std::counting_semaphore<> in_flight_;
};

RewriteResult rewrite_identity(const RewriteRequest& request);
RewriteResult rewrite_remote(const RewriteRequest& request, const RemoteRewriterConfig& config);

}  // namespace exrw
