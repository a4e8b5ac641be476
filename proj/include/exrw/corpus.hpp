#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace exrw {

class DatasetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Document {
  std::string doc_id;
  std::string text;
};

struct Sentence {
  std::size_t index = 0;  // global within the cluster: document order, then reading order
  std::string doc_id;
  std::string text;          // normalized
  std::string content_hash;  // sha256 hex of `text`
};

struct ClusterRecord {
  std::string id;
  std::vector<Document> documents;
  std::optional<std::string> reference_summary;
  std::vector<Sentence> sentences;

  std::size_t size() const { return sentences.size(); }
};

/// Rule-based sentence scanner. A sentence ends after a run of '.', '!' or
/// '?' (plus any closing quotes or brackets) when the next non-space
/// character is uppercase, a digit or an opening quote. Known abbreviations
/// such as "Dr." or "e.g." never end a sentence.
std::vector<std::string> split_sentences(std::string_view text);

/// Trim and collapse internal whitespace runs to a single space.
std::string normalize_text(std::string_view text);

/// 64 hex chars: SHA-256 of the normalized text.
std::string content_hash(std::string_view text);

/// Splits every document and assigns indices 0..N-1.
std::vector<Sentence> index_sentences(const std::vector<Document>& documents);

ClusterRecord make_cluster(std::string id, std::vector<Document> documents,
                           std::optional<std::string> reference_summary = std::nullopt);

/// Parses one JSONL object. `line_no` is 1-based and only used in messages.
ClusterRecord parse_cluster_line(std::string_view line, std::size_t line_no);

std::vector<ClusterRecord> load_cluster_dataset(const std::filesystem::path& path);

}  // namespace exrw
