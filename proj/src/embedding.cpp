#include "exrw/embedding.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>

#include "exrw/corpus.hpp"
#include "exrw/metrics.hpp"

namespace exrw {

namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

SentenceVector checked_unit(SentenceVector v, int dim, std::string_view what) {
  if (v.size() != dim) {
    throw EmbeddingError(std::string(what) + ": expected dim " + std::to_string(dim) + ", found " +
                         std::to_string(v.size()));
  }
  if (!v.allFinite()) throw EmbeddingError(std::string(what) + ": non-finite vector entry");
  return unit(v);
}

}  // namespace

SentenceVector mean_pool(std::span<const SentenceVector> vectors) {
  if (vectors.empty()) throw EmbeddingError("cannot pool zero vectors");
  SentenceVector sum = SentenceVector::Zero(vectors.front().size());
  for (const auto& v : vectors) {
    if (v.size() != sum.size()) throw EmbeddingError("mean_pool: dimension mismatch");
    sum += v;
  }
  return unit(sum / static_cast<double>(vectors.size()));
}

ProviderKind parse_provider_kind(std::string_view name) {
  if (name == "cache") return ProviderKind::cache;
  if (name == "remote") return ProviderKind::remote;
  if (name == "fallback") return ProviderKind::fallback;
  throw EmbeddingError("unknown embedder kind: " + std::string(name));
}

std::string_view to_string(ProviderKind kind) {
  switch (kind) {
    case ProviderKind::cache: return "cache";
    case ProviderKind::remote: return "remote";
    case ProviderKind::fallback: return "fallback";
  }
  return "fallback";
}

SentenceVector EmbeddingProvider::embed_text(std::string_view text) const {
  const auto sentences = split_sentences(text);
  if (sentences.empty()) return SentenceVector::Zero(dim());
  return mean_pool(embed(sentences));
}

// -- fallback ---------------------------------------------------------------

FallbackEmbedder::FallbackEmbedder(int dim) : dim_(dim) {
  if (dim <= 0) throw EmbeddingError("embedding dim must be positive");
}

SentenceVector FallbackEmbedder::embed_one(std::string_view text) const {
  SentenceVector v = SentenceVector::Zero(dim_);
  for (const auto& token : tokenize(text)) {
    const auto h = fnv1a(token);
    const auto bucket = static_cast<Eigen::Index>(h % static_cast<std::uint64_t>(dim_));
    v[bucket] += ((h >> 32) & 1U) ? -1.0 : 1.0;
  }
  return unit(v);
}

std::vector<SentenceVector> FallbackEmbedder::embed(std::span<const std::string> texts) const {
  std::vector<SentenceVector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(embed_one(t));
  return out;
}

// -- cache ------------------------------------------------------------------

EmbeddingCache load_embedding_cache(const std::filesystem::path& path) {
  using nlohmann::json;
  std::ifstream in(path);
  if (!in) throw EmbeddingError("cannot open embedding cache " + path.string());

  EmbeddingCache cache;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw EmbeddingError("embedding cache line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!have_header) {
      if (obj.value("format", "") != "embcache" || !obj.contains("dim")) {
        throw EmbeddingError("embedding cache header missing format/dim");
      }
      cache.dim = obj.at("dim").get<int>();
      if (cache.dim <= 0) throw EmbeddingError("embedding cache dim must be positive");
      have_header = true;
      continue;
    }
    const auto values = obj.at("vector").get<std::vector<double>>();
    SentenceVector v = Eigen::Map<const SentenceVector>(values.data(), static_cast<Eigen::Index>(values.size()));
    cache.vectors[obj.at("key").get<std::string>()] =
        checked_unit(std::move(v), cache.dim, "embedding cache line " + std::to_string(line_no));
  }
  if (!have_header) throw EmbeddingError("embedding cache is empty: " + path.string());
  return cache;
}

void write_embedding_cache(const std::filesystem::path& path, int dim,
                           const std::vector<std::pair<std::string, SentenceVector>>& entries) {
  std::ofstream out(path);
  if (!out) throw EmbeddingError("cannot write embedding cache " + path.string());
  out << nlohmann::json{{"format", "embcache"}, {"dim", dim}}.dump() << '\n';
  for (const auto& [key, v] : entries) {
    if (v.size() != dim) throw EmbeddingError("write_embedding_cache: dimension mismatch for " + key);
    nlohmann::json row;
    row["key"] = key;
    row["vector"] = std::vector<double>(v.data(), v.data() + v.size());
    out << row.dump() << '\n';
  }
}

CacheEmbedder::CacheEmbedder(EmbeddingCache cache) : cache_(std::move(cache)) {}

std::vector<SentenceVector> CacheEmbedder::embed(std::span<const std::string> texts) const {
  std::vector<SentenceVector> out;
  std::vector<std::string> missing;
  out.reserve(texts.size());
  for (const auto& t : texts) {
    const auto key = content_hash(t);
    auto it = cache_.vectors.find(key);
    if (it == cache_.vectors.end()) {
      missing.push_back(key);
      continue;
    }
    out.push_back(it->second);
  }
  if (!missing.empty()) {
    std::string msg = "embedding cache miss for " + std::to_string(missing.size()) + " key(s):";
    for (const auto& k : missing) msg += " " + k;
    throw EmbeddingError(msg);
  }
  return out;
}

// -- remote -----------------------------------------------------------------

RemoteEmbedder::RemoteEmbedder(std::string endpoint, int dim, int max_batch, RetryPolicy retry)
    : endpoint_(std::move(endpoint)), dim_(dim), max_batch_(max_batch), retry_(retry) {
  if (dim_ <= 0) throw EmbeddingError("embedding dim must be positive");
  if (max_batch_ <= 0) throw EmbeddingError("max_batch must be positive");
}

std::vector<SentenceVector> RemoteEmbedder::embed(std::span<const std::string> texts) const {
  std::vector<SentenceVector> out;
  out.reserve(texts.size());
  for (std::size_t begin = 0; begin < texts.size(); begin += static_cast<std::size_t>(max_batch_)) {
    const auto end = std::min(texts.size(), begin + static_cast<std::size_t>(max_batch_));
    nlohmann::json body;
    body["texts"] = std::vector<std::string>(texts.begin() + begin, texts.begin() + end);
    const auto res = post_json(endpoint_, "/embed", body, retry_);

    const auto dim = res.at("dim").get<int>();
    if (dim != dim_) {
      throw EmbeddingError("remote embedder: expected dim " + std::to_string(dim_) + ", found " +
                           std::to_string(dim));
    }
    const auto& rows = res.at("vectors");
    if (!rows.is_array() || rows.size() != end - begin) {
      throw EmbeddingError("remote embedder: vector count does not match request");
    }
    for (const auto& row : rows) {
      const auto values = row.get<std::vector<double>>();
      SentenceVector v = Eigen::Map<const SentenceVector>(values.data(), static_cast<Eigen::Index>(values.size()));
      out.push_back(checked_unit(std::move(v), dim_, "remote embedder"));
    }
  }
  return out;
}

SentenceVector RemoteEmbedder::embed_text(std::string_view text) const {
  const std::string whole(text);
  if (normalize_text(whole).empty()) return SentenceVector::Zero(dim_);
  return embed(std::span<const std::string>(&whole, 1)).front();
}

std::unique_ptr<EmbeddingProvider> make_provider(const EmbeddingProviderConfig& config) {
  switch (config.kind) {
    case ProviderKind::fallback:
      return std::make_unique<FallbackEmbedder>(config.dim);
    case ProviderKind::cache: {
      if (!config.cache_path) throw EmbeddingError("cache embedder requires cache_path");
      auto cache = load_embedding_cache(*config.cache_path);
      if (cache.dim != config.dim) {
        throw EmbeddingError("embedding cache dim " + std::to_string(cache.dim) +
                             " does not match configured dim " + std::to_string(config.dim));
      }
      return std::make_unique<CacheEmbedder>(std::move(cache));
    }
    case ProviderKind::remote: {
      if (!config.endpoint_url) throw EmbeddingError("remote embedder requires endpoint_url");
      auto retry = config.retry;
      retry.timeout = std::chrono::milliseconds(config.timeout_ms);
      return std::make_unique<RemoteEmbedder>(*config.endpoint_url, config.dim, config.max_batch, retry);
    }
  }
  throw EmbeddingError("unknown embedder kind");
}

Eigen::MatrixXd embed_columns(const EmbeddingProvider& provider, std::span<const std::string> texts) {
  const auto vectors = provider.embed(texts);
  Eigen::MatrixXd out(provider.dim(), static_cast<Eigen::Index>(vectors.size()));
  for (std::size_t i = 0; i < vectors.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = vectors[i];
  return out;
}

}  // namespace exrw
