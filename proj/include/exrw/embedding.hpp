#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "exrw/http_client.hpp"

namespace exrw {

/// Dense sentence embedding. Providers emit unit-length vectors.
using SentenceVector = Eigen::VectorXd;

class EmbeddingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Cosine similarity; 0 when either vector is all-zero.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar cosine(const Eigen::MatrixBase<DerivedA>& u,
                                 const Eigen::MatrixBase<DerivedB>& v) {
  using Scalar = typename DerivedA::Scalar;
  if (u.size() != v.size()) throw EmbeddingError("cosine: dimension mismatch");
  const Scalar nu = u.norm();
  const Scalar nv = v.norm();
  if (nu == Scalar(0) || nv == Scalar(0)) return Scalar(0);
  const Scalar c = u.dot(v) / (nu * nv);
  return std::clamp(c, Scalar(-1), Scalar(1));
}

/// Unit-length copy; zero vectors are returned unchanged.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> unit(const Eigen::MatrixBase<Derived>& v) {
  const auto n = v.norm();
  if (n == 0) return v;
  return v / n;
}

/// Coordinate-wise mean, re-normalized to unit length.
SentenceVector mean_pool(std::span<const SentenceVector> vectors);

enum class ProviderKind { cache, remote, fallback };

ProviderKind parse_provider_kind(std::string_view name);
std::string_view to_string(ProviderKind kind);

struct EmbeddingProviderConfig {
  ProviderKind kind = ProviderKind::fallback;
  int dim = 64;
  std::optional<std::filesystem::path> cache_path;
  std::optional<std::string> endpoint_url;
  int timeout_ms = 30000;
  int max_batch = 32;
  RetryPolicy retry{};
};

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  virtual int dim() const = 0;
  virtual ProviderKind kind() const = 0;

  /// One unit vector per sentence text.
  virtual std::vector<SentenceVector> embed(std::span<const std::string> texts) const = 0;

  /// Embedding of a multi-sentence text. Cache and fallback providers
  /// mean-pool the vectors of its sentences; the remote provider embeds the
  /// whole text in one call.
  virtual SentenceVector embed_text(std::string_view text) const;
};

/// Hashed bag of words: each lowercase token adds +/-1 to one of `dim`
/// buckets (FNV-1a 64), then the sum is L2-normalized. A text without
/// tokens maps to the zero vector.
class FallbackEmbedder final : public EmbeddingProvider {
 public:
  explicit FallbackEmbedder(int dim = 64);
  int dim() const override { return dim_; }
  ProviderKind kind() const override { return ProviderKind::fallback; }
  std::vector<SentenceVector> embed(std::span<const std::string> texts) const override;
  SentenceVector embed_one(std::string_view text) const;

 private:
  int dim_;
};

struct EmbeddingCache {
  int dim = 0;
  std::unordered_map<std::string, SentenceVector> vectors;  // keyed by content_hash
};

EmbeddingCache load_embedding_cache(const std::filesystem::path& path);
void write_embedding_cache(const std::filesystem::path& path, int dim,
                           const std::vector<std::pair<std::string, SentenceVector>>& entries);

/// Read-only lookup by content hash. Misses are errors.
class CacheEmbedder final : public EmbeddingProvider {
 public:
  explicit CacheEmbedder(EmbeddingCache cache);
  int dim() const override { return cache_.dim; }
  ProviderKind kind() const override { return ProviderKind::cache; }
  std::vector<SentenceVector> embed(std::span<const std::string> texts) const override;

 private:
  EmbeddingCache cache_;
};

/// Client for `POST /embed {"texts":[...]}` -> `{"dim":d,"vectors":[[...]]}`.
class RemoteEmbedder final : public EmbeddingProvider {
 public:
  RemoteEmbedder(std::string endpoint, int dim, int max_batch, RetryPolicy retry);
  int dim() const override { return dim_; }
  ProviderKind kind() const override { return ProviderKind::remote; }
  std::vector<SentenceVector> embed(std::span<const std::string> texts) const override;
  SentenceVector embed_text(std::string_view text) const override;

 private:
  std::string endpoint_;
  int dim_;
  int max_batch_;
  RetryPolicy retry_;
};

std::unique_ptr<EmbeddingProvider> make_provider(const EmbeddingProviderConfig& config);

/// Embeds a list of texts into the columns of a d x N matrix.
Eigen::MatrixXd embed_columns(const EmbeddingProvider& provider, std::span<const std::string> texts);

}  // namespace exrw
