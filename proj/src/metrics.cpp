#include "exrw/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>

#include "exrw/corpus.hpp"

namespace exrw {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

bool is_ascii_punct(char c) {
  const auto u = static_cast<unsigned char>(c);
  return u < 0x80 && std::ispunct(u);
}

using Ngram = std::vector<std::string_view>;

std::map<Ngram, int> ngram_counts(std::span<const std::string> tokens, int n) {
  std::map<Ngram, int> counts;
  const auto size = static_cast<int>(tokens.size());
  for (int i = 0; i + n <= size; ++i) {
    Ngram g(tokens.begin() + i, tokens.begin() + i + n);
    ++counts[g];
  }
  return counts;
}

nlohmann::json rouge_json(const RougeScore& s) { return {{"p", s.precision}, {"r", s.recall}, {"f1", s.f1}}; }

nlohmann::json reward_json(const RewardBreakdown& r) {
  return {{"rouge2_f1", r.rouge2_f1}, {"rougeL_f1", r.rougeL_f1}, {"rouge_avg", r.rouge_avg}, {"sim", r.sim},
          {"total", r.total}};
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t j = i;
    while (j < text.size() && !is_space(text[j])) ++j;
    std::size_t b = i;
    std::size_t e = j;
    while (b < e && is_ascii_punct(text[b])) ++b;
    while (e > b && is_ascii_punct(text[e - 1])) --e;
    if (b < e) {
      std::string token(text.substr(b, e - b));
      for (auto& ch : token) {
        if (ch >= 'A' && ch <= 'Z') ch = static_cast<char>(ch - 'A' + 'a');
      }
      tokens.push_back(std::move(token));
    }
    i = j;
  }
  return tokens;
}

RougeScore RougeScore::from_counts(double overlap, double candidate_total, double reference_total) {
  RougeScore s;
  if (candidate_total > 0) s.precision = overlap / candidate_total;
  if (reference_total > 0) s.recall = overlap / reference_total;
  if (s.precision + s.recall > 0) s.f1 = 2 * s.precision * s.recall / (s.precision + s.recall);
  return s;
}

RougeScore rouge_n(std::span<const std::string> candidate, std::span<const std::string> reference, int n) {
  if (n < 1) throw std::invalid_argument("rouge_n: n must be >= 1");
  const auto cand = ngram_counts(candidate, n);
  const auto ref = ngram_counts(reference, n);
  int overlap = 0;
  for (const auto& [gram, count] : cand) {
    if (auto it = ref.find(gram); it != ref.end()) overlap += std::min(count, it->second);
  }
  const auto total = [n](std::span<const std::string> t) {
    return static_cast<double>(std::max(0, static_cast<int>(t.size()) - n + 1));
  };
  return RougeScore::from_counts(overlap, total(candidate), total(reference));
}

RougeScore rouge_l(std::span<const std::string> candidate, std::span<const std::string> reference) {
  std::vector<int> prev(reference.size() + 1, 0);
  std::vector<int> row(reference.size() + 1, 0);
  for (const auto& c : candidate) {
    for (std::size_t j = 1; j <= reference.size(); ++j) {
      row[j] = (c == reference[j - 1]) ? prev[j - 1] + 1 : std::max(prev[j], row[j - 1]);
    }
    std::swap(prev, row);
  }
  const double lcs = prev[reference.size()];
  return RougeScore::from_counts(lcs, static_cast<double>(candidate.size()), static_cast<double>(reference.size()));
}

RewardBreakdown combine_reward(double rouge2_f1, double rougeL_f1, double similarity) {
  RewardBreakdown r;
  r.rouge2_f1 = rouge2_f1;
  r.rougeL_f1 = rougeL_f1;
  r.rouge_avg = 0.5 * (rouge2_f1 + rougeL_f1);
  r.sim = std::clamp(similarity, 0.0, 1.0);
  r.total = 0.5 * (r.rouge_avg + r.sim);
  return r;
}

ReferenceTarget ReferenceTarget::make(std::string_view text, const EmbeddingProvider& provider) {
  if (normalize_text(text).empty()) throw std::invalid_argument("reference summary is empty");
  return {std::string(text), tokenize(text), provider.embed_text(text)};
}

RewardBreakdown score_text(std::string_view candidate, const SentenceVector& candidate_vector,
                           const ReferenceTarget& reference) {
  const auto tokens = tokenize(candidate);
  if (tokens.empty() && normalize_text(candidate).empty()) return {};
  return combine_reward(rouge_n(tokens, reference.tokens, 2).f1, rouge_l(tokens, reference.tokens).f1,
                        cosine(candidate_vector, reference.vector));
}

RewardBreakdown summary_reward(std::string_view s_final, std::string_view s_ref, const EmbeddingProvider& provider) {
  const auto reference = ReferenceTarget::make(s_ref, provider);
  if (normalize_text(s_final).empty()) return {};
  return score_text(s_final, provider.embed_text(s_final), reference);
}

RewardBreakdown step_reward(std::string_view sentence, std::string_view s_ref, const EmbeddingProvider& provider) {
  return summary_reward(sentence, s_ref, provider);
}

ClusterEvaluation evaluate_summary(std::string cluster_id, std::string_view summary, const ReferenceTarget& reference,
                                   const EmbeddingProvider& provider) {
  ClusterEvaluation row;
  row.cluster_id = std::move(cluster_id);
  const auto tokens = tokenize(summary);
  row.rouge1 = rouge_n(tokens, reference.tokens, 1);
  row.rouge2 = rouge_n(tokens, reference.tokens, 2);
  row.rougeL = rouge_l(tokens, reference.tokens);
  if (!normalize_text(summary).empty()) row.reward = score_text(summary, provider.embed_text(summary), reference);
  return row;
}

nlohmann::json evaluation_report(std::span<const ClusterEvaluation> rows) {
  nlohmann::json clusters = nlohmann::json::array();
  ClusterEvaluation mean;
  for (const auto& row : rows) {
    clusters.push_back({{"cluster_id", row.cluster_id},
                        {"rouge1", rouge_json(row.rouge1)},
                        {"rouge2", rouge_json(row.rouge2)},
                        {"rougeL", rouge_json(row.rougeL)},
                        {"reward", reward_json(row.reward)}});
    for (auto [acc, val] : {std::pair{&mean.rouge1, &row.rouge1}, {&mean.rouge2, &row.rouge2}, {&mean.rougeL, &row.rougeL}}) {
      acc->precision += val->precision;
      acc->recall += val->recall;
      acc->f1 += val->f1;
    }
    mean.reward.rouge2_f1 += row.reward.rouge2_f1;
    mean.reward.rougeL_f1 += row.reward.rougeL_f1;
    mean.reward.rouge_avg += row.reward.rouge_avg;
    mean.reward.sim += row.reward.sim;
    mean.reward.total += row.reward.total;
  }
  const double n = rows.empty() ? 1.0 : static_cast<double>(rows.size());
  for (auto* s : {&mean.rouge1, &mean.rouge2, &mean.rougeL}) {
    s->precision /= n;
    s->recall /= n;
    s->f1 /= n;
  }
  for (auto* v : {&mean.reward.rouge2_f1, &mean.reward.rougeL_f1, &mean.reward.rouge_avg, &mean.reward.sim,
                  &mean.reward.total}) {
    *v /= n;
  }
  return {{"clusters", clusters},
          {"mean",
           {{"rouge1", rouge_json(mean.rouge1)},
            {"rouge2", rouge_json(mean.rouge2)},
            {"rougeL", rouge_json(mean.rougeL)},
            {"reward", reward_json(mean.reward)}}},
          {"count", rows.size()}};
}

std::string evaluation_table(std::span<const ClusterEvaluation> rows) {
  std::size_t width = 7;
  for (const auto& r : rows) width = std::max(width, r.cluster_id.size());

  std::ostringstream out;
  char buf[128];
  auto line = [&](const std::string& name, double r1, double r2, double rl) {
    std::snprintf(buf, sizeof buf, "  %8.4f  %8.4f  %8.4f\n", r1, r2, rl);
    out << name << std::string(width - name.size(), ' ') << buf;
  };
  out << "cluster" << std::string(width - 7, ' ') << "   ROUGE-1   ROUGE-2   ROUGE-L\n";
  double m1 = 0, m2 = 0, ml = 0;
  for (const auto& r : rows) {
    line(r.cluster_id, r.rouge1.f1, r.rouge2.f1, r.rougeL.f1);
    m1 += r.rouge1.f1;
    m2 += r.rouge2.f1;
    ml += r.rougeL.f1;
  }
  const double n = rows.empty() ? 1.0 : static_cast<double>(rows.size());
  line("mean", m1 / n, m2 / n, ml / n);
  return out.str();
}

}  // namespace exrw
