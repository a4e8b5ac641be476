#include <cmath>
#include <filesystem>
#include <fstream>
#include <thread>

#include "doctest.h"
#include "exrw/corpus.hpp"
#include "exrw/embedding.hpp"
#include "httplib.h"
#include "support/mock_sidecar.hpp"

using namespace exrw;
namespace fs = std::filesystem;

TEST_CASE("cosine") {
  Eigen::VectorXd u(2), v(2), w(2), z = Eigen::VectorXd::Zero(2);
  u << 1, 0;
  v << 1, 1;
  v /= std::sqrt(2.0);
  w << 0, 1;
  CHECK(cosine(u, u) == doctest::Approx(1.0));
  CHECK(cosine(u, w) == doctest::Approx(0.0));
  CHECK(cosine(u, v) == doctest::Approx(0.70711).epsilon(1e-5));
  CHECK(cosine(u, v) == cosine(v, u));
  CHECK(cosine(u, z) == 0.0);
  CHECK(cosine(z, z) == 0.0);
  CHECK_THROWS_AS(cosine(u, Eigen::VectorXd::Ones(3)), EmbeddingError);
}

TEST_CASE("mean_pool") {
  Eigen::VectorXd a(2), b(2);
  a << 1, 0;
  b << 0, 1;
  std::vector<SentenceVector> one{a};
  std::vector<SentenceVector> twice{a, a};
  std::vector<SentenceVector> both{a, b};
  CHECK(mean_pool(one).isApprox(a));
  CHECK(mean_pool(twice).isApprox(a));
  const auto m = mean_pool(both);
  CHECK(m[0] == doctest::Approx(0.70711).epsilon(1e-5));
  CHECK(m[1] == doctest::Approx(0.70711).epsilon(1e-5));
  CHECK_THROWS_WITH_AS(mean_pool(std::vector<SentenceVector>{}), "cannot pool zero vectors", EmbeddingError);
}

TEST_CASE("fallback embedder") {
  FallbackEmbedder e(64);
  const auto v1 = e.embed_one("The storm hit the coast.");
  const auto v2 = e.embed_one("The storm hit the coast.");
  CHECK(v1 == v2);
  CHECK(v1.norm() == doctest::Approx(1.0).epsilon(1e-6));
  // a pure function of the token multiset
  CHECK(e.embed_one("coast storm hit the the") == v1);
  CHECK(e.embed_one("...") == Eigen::VectorXd::Zero(64));

  FallbackEmbedder small(4);
  CHECK(cosine(small.embed_one("a"), small.embed_one("b")) < 1.0);
  // FNV-1a puts "a" and "b" in buckets 0 and 1 with the same sign
  CHECK(cosine(small.embed_one("a"), small.embed_one("b")) == doctest::Approx(0.0));
}

TEST_CASE("embedding cache round trip and misses") {
  FallbackEmbedder e(8);
  const std::vector<std::string> texts{"First sentence.", "Second one here."};
  std::vector<std::pair<std::string, SentenceVector>> entries;
  for (const auto& t : texts) entries.emplace_back(content_hash(t), e.embed_one(t) * 3.0);
  const auto path = fs::temp_directory_path() / "exrw_embcache.jsonl";
  write_embedding_cache(path, 8, entries);

  CacheEmbedder cache(load_embedding_cache(path));
  CHECK(cache.dim() == 8);
  const auto got = cache.embed(texts);
  REQUIRE(got.size() == 2);
  CHECK(got[0].norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(got[0].isApprox(e.embed_one(texts[0])));

  const std::vector<std::string> unknown{"Never cached."};
  try {
    cache.embed(unknown);
    FAIL("expected a cache miss");
  } catch (const EmbeddingError& err) {
    CHECK(std::string(err.what()).find(content_hash("Never cached.")) != std::string::npos);
  }

  EmbeddingProviderConfig cfg;
  cfg.kind = ProviderKind::cache;
  cfg.dim = 16;
  cfg.cache_path = path;
  CHECK_THROWS_AS(make_provider(cfg), EmbeddingError);
}

TEST_CASE("provider substitutability: cache built from fallback behaves identically") {
  FallbackEmbedder e(16);
  const std::string text = "Alpha beta gamma. Delta epsilon.";
  std::vector<std::pair<std::string, SentenceVector>> entries;
  for (const auto& s : split_sentences(text)) entries.emplace_back(content_hash(s), e.embed_one(s));
  const auto path = fs::temp_directory_path() / "exrw_embcache_sub.jsonl";
  write_embedding_cache(path, 16, entries);
  CacheEmbedder cache(load_embedding_cache(path));
  CHECK(cache.embed_text(text).isApprox(e.embed_text(text), 1e-12));
}

TEST_CASE("remote embedder against a mock sidecar") {
  testing::MockSidecar sidecar(6);
  RetryPolicy retry;
  retry.base_backoff = std::chrono::milliseconds(5);
  RemoteEmbedder remote(sidecar.url(), 6, 2, retry);

  const std::vector<std::string> texts{"one", "two", "one", "three", "four"};
  const auto vs = remote.embed(texts);
  REQUIRE(vs.size() == 5);
  for (const auto& v : vs) CHECK(v.norm() == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(vs[0] == vs[2]);
  CHECK(sidecar.embed_calls() == 3);  // batches of 2

  CHECK(remote.embed_text("Two sentences. In one call.").size() == 6);
  CHECK(sidecar.embed_calls() == 4);

  RemoteEmbedder wrong_dim(sidecar.url(), 7, 8, retry);
  CHECK_THROWS_AS(wrong_dim.embed(texts), EmbeddingError);
}

TEST_CASE("remote embedder retries then fails") {
  testing::MockSidecar sidecar(4);
  sidecar.fail_next(100, 503);
  RetryPolicy retry;
  retry.base_backoff = std::chrono::milliseconds(10);
  RemoteEmbedder remote(sidecar.url(), 4, 8, retry);
  const std::vector<std::string> texts{"x"};
  try {
    remote.embed(texts);
    FAIL("expected failure");
  } catch (const TransportError& e) {
    CHECK(e.status() == 503);
  }
  CHECK(sidecar.embed_calls() == 4);

  sidecar.fail_next(2, 500);
  CHECK(remote.embed(texts).size() == 1);
}
