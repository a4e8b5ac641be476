#include "exrw/corpus.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <fstream>
#include <set>

#include "json.hpp"

namespace exrw {

namespace {

constexpr std::array<std::string_view, 12> kAbbreviations = {
    "Dr.", "Mr.", "Mrs.", "Ms.", "U.S.", "e.g.", "i.e.", "etc.", "vs.", "No.", "Fig.", "Eq."};

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }
bool is_terminator(char c) { return c == '.' || c == '!' || c == '?'; }
bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

// Length of a closing quote/bracket starting at `pos`, 0 if none.
std::size_t closer_length(std::string_view s, std::size_t pos) {
  const char c = s[pos];
  if (c == '"' || c == '\'' || c == ')' || c == ']') return 1;
  // U+201D right double quote, U+2019 right single quote
  if (s.substr(pos, 3) == "\xE2\x80\x9D" || s.substr(pos, 3) == "\xE2\x80\x99") return 3;
  return 0;
}

bool opens_sentence(std::string_view s, std::size_t pos) {
  const char c = s[pos];
  if (is_upper(c) || is_digit(c) || c == '"' || c == '\'' || c == '(') return true;
  return s.substr(pos, 3) == "\xE2\x80\x9C";  // U+201C left double quote
}

// The whitespace-delimited word ending at `end` (exclusive), with leading
// opening quotes/brackets dropped.
std::string_view word_before(std::string_view s, std::size_t end) {
  std::size_t begin = end;
  while (begin > 0 && !is_space(s[begin - 1])) --begin;
  while (begin < end && (s[begin] == '"' || s[begin] == '\'' || s[begin] == '(')) ++begin;
  return s.substr(begin, end - begin);
}

std::string_view trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return s.substr(b, e - b);
}

}  // namespace

std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> out;
  auto emit = [&](std::size_t begin, std::size_t end) {
    const auto piece = trim(text.substr(begin, end - begin));
    if (!piece.empty()) out.emplace_back(piece);
  };

  std::size_t start = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!is_terminator(text[i])) {
      ++i;
      continue;
    }
    std::size_t run_end = i;
    while (run_end < text.size() && is_terminator(text[run_end])) ++run_end;
    std::size_t end = run_end;
    while (end < text.size()) {
      const auto len = closer_length(text, end);
      if (len == 0) break;
      end += len;
    }
    std::size_t next = end;
    while (next < text.size() && is_space(text[next])) ++next;

    const bool has_gap = next > end;
    if (has_gap && next < text.size() && opens_sentence(text, next)) {
      const auto word = word_before(text, run_end);
      const bool abbreviation =
          std::find(kAbbreviations.begin(), kAbbreviations.end(), word) != kAbbreviations.end();
      if (!abbreviation) {
        emit(start, end);
        start = next;
      }
    }
    i = std::max(end, run_end);
  }
  if (start < text.size()) emit(start, text.size());
  return out;
}

std::string normalize_text(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char c : trim(text)) {
    if (is_space(c)) {
      pending_space = true;
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

std::string content_hash(std::string_view text) {
  const auto normalized = normalize_text(text);
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  EVP_Digest(normalized.data(), normalized.size(), digest.data(), &length, EVP_sha256(), nullptr);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  hex.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) {
    hex.push_back(kHex[digest[i] >> 4]);
    hex.push_back(kHex[digest[i] & 0xF]);
  }
  return hex;
}

std::vector<Sentence> index_sentences(const std::vector<Document>& documents) {
  std::vector<Sentence> sentences;
  for (const auto& doc : documents) {
    for (auto& piece : split_sentences(doc.text)) {
      Sentence s;
      s.index = sentences.size();
      s.doc_id = doc.doc_id;
      s.text = normalize_text(piece);
      s.content_hash = content_hash(s.text);
      sentences.push_back(std::move(s));
    }
  }
  return sentences;
}

ClusterRecord make_cluster(std::string id, std::vector<Document> documents,
                           std::optional<std::string> reference_summary) {
  ClusterRecord record;
  record.id = std::move(id);
  record.documents = std::move(documents);
  record.reference_summary = std::move(reference_summary);
  record.sentences = index_sentences(record.documents);
  return record;
}

ClusterRecord parse_cluster_line(std::string_view line, std::size_t line_no) {
  using nlohmann::json;
  const auto where = " at line " + std::to_string(line_no);

  json obj;
  try {
    obj = json::parse(line);
  } catch (const json::parse_error& e) {
    throw DatasetError("malformed JSON" + where + ": " + e.what());
  }
  if (!obj.is_object()) throw DatasetError("expected a JSON object" + where);

  auto require = [&](const json& o, const char* field) -> const json& {
    auto it = o.find(field);
    if (it == o.end()) throw DatasetError(std::string("missing field ") + field + where);
    return *it;
  };
  auto require_string = [&](const json& o, const char* field) -> std::string {
    const auto& v = require(o, field);
    if (!v.is_string()) throw DatasetError(std::string("field ") + field + " must be a string" + where);
    return v.get<std::string>();
  };

  auto id = require_string(obj, "id");
  if (id.empty()) throw DatasetError("field id must be nonempty" + where);

  const auto& docs = require(obj, "documents");
  if (!docs.is_array()) throw DatasetError("field documents must be an array" + where);

  std::vector<Document> documents;
  bool any_text = false;
  for (const auto& d : docs) {
    if (!d.is_object()) throw DatasetError("documents entries must be objects" + where);
    Document doc{require_string(d, "doc_id"), require_string(d, "text")};
    any_text = any_text || !trim(doc.text).empty();
    documents.push_back(std::move(doc));
  }
  if (!any_text) throw DatasetError("cluster " + id + " has no document text" + where);

  std::optional<std::string> summary;
  if (auto it = obj.find("summary"); it != obj.end() && !it->is_null()) {
    if (!it->is_string()) throw DatasetError("field summary must be a string" + where);
    summary = it->get<std::string>();
  }
  return make_cluster(std::move(id), std::move(documents), std::move(summary));
}

std::vector<ClusterRecord> load_cluster_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DatasetError("cannot open dataset " + path.string());

  std::vector<ClusterRecord> records;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto record = parse_cluster_line(line, line_no);
    if (!seen.insert(record.id).second) {
      throw DatasetError("duplicate cluster id " + record.id + " at line " + std::to_string(line_no));
    }
    records.push_back(std::move(record));
  }
  return records;
}

}  // namespace exrw
