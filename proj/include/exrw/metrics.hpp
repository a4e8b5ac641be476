#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "exrw/embedding.hpp"
#include "json.hpp"

namespace exrw {

/// Lowercase, split on whitespace, strip leading/trailing ASCII
/// punctuation, drop empties. No stemming, no stopwords.
std::vector<std::string> tokenize(std::string_view text);

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  static RougeScore from_counts(double overlap, double candidate_total, double reference_total);
};

/// Clipped n-gram overlap.
RougeScore rouge_n(std::span<const std::string> candidate, std::span<const std::string> reference, int n);

/// Longest-common-subsequence based.
RougeScore rouge_l(std::span<const std::string> candidate, std::span<const std::string> reference);

struct RewardBreakdown {
  double rouge2_f1 = 0.0;
  double rougeL_f1 = 0.0;
  double rouge_avg = 0.0;
  double sim = 0.0;
  double total = 0.0;
};

/// 0.5 * (0.5 * (ROUGE-2 F1 + ROUGE-L F1) + sim), sim clamped to [0, 1].
RewardBreakdown combine_reward(double rouge2_f1, double rougeL_f1, double similarity);

/// Reference pre-tokenized and pre-embedded, for scoring many candidates.
struct ReferenceTarget {
  std::string text;
  std::vector<std::string> tokens;
  SentenceVector vector;

  static ReferenceTarget make(std::string_view text, const EmbeddingProvider& provider);
};

RewardBreakdown score_text(std::string_view candidate, const SentenceVector& candidate_vector,
                           const ReferenceTarget& reference);

/// Trajectory reward of a rewritten summary. Empty text scores all zeros.
RewardBreakdown summary_reward(std::string_view s_final, std::string_view s_ref, const EmbeddingProvider& provider);

/// Per-step reward of one extracted sentence; same formula as summary_reward.
RewardBreakdown step_reward(std::string_view sentence, std::string_view s_ref, const EmbeddingProvider& provider);

struct ClusterEvaluation {
  std::string cluster_id;
  RougeScore rouge1;
  RougeScore rouge2;
  RougeScore rougeL;
  RewardBreakdown reward;
};

ClusterEvaluation evaluate_summary(std::string cluster_id, std::string_view summary, const ReferenceTarget& reference,
                                   const EmbeddingProvider& provider);

/// `{"clusters":[{"cluster_id":..,"rouge1":{p,r,f1},...,"reward":{...}}], "mean":{...}}`
nlohmann::json evaluation_report(std::span<const ClusterEvaluation> rows);

/// Plain-text ROUGE-1/2/L F1 table, one row per cluster plus the mean.
std::string evaluation_table(std::span<const ClusterEvaluation> rows);

}  // namespace exrw
