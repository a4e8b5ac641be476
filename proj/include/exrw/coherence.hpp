#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "exrw/control.hpp"
#include "exrw/corpus.hpp"
#include "exrw/embedding.hpp"
#include "exrw/neural.hpp"

namespace exrw {

struct CoherenceModel {
  Mlp params;

  static CoherenceModel zeros(int dim) { return {Mlp::zeros(5 * dim)}; }
  static CoherenceModel random(int dim, Rng& rng) { return {Mlp::random(5 * dim, rng)}; }

  bool operator==(const CoherenceModel&) const = default;
};

/// Order-sensitive: scores `x2` as the sentence following `x1`.
double coherence_score(const CoherenceModel& m, const SentenceVector& x1, const SentenceVector& x2);

/// N x N table with entry (p, i) = coherence_score(col p, col i).
Eigen::MatrixXd coherence_table(const CoherenceModel& m, const Eigen::MatrixXd& vectors);

enum class NegativeKind { random_source, self_pair };

std::string_view to_string(NegativeKind kind);

struct Triplet {
  SentenceVector anchor;
  SentenceVector positive;
  SentenceVector negative;  // equals `anchor` for self_pair
  NegativeKind negative_kind = NegativeKind::random_source;
  std::string anchor_text;
  std::string positive_text;
  std::string negative_text;
};

struct TripletSet {
  std::vector<Triplet> triplets;
  std::size_t skipped_clusters = 0;  // clusters without a reference summary
};

/// Two triplets per consecutive pair of reference-summary sentences: one
/// whose negative is a source sentence drawn uniformly with `seed`, one
/// whose negative pair is the anchor paired with itself.
TripletSet build_triplets(std::span<const ClusterRecord> clusters, const EmbeddingProvider& provider,
                          std::uint64_t seed);

void write_triplets_jsonl(const std::filesystem::path& path, std::span<const Triplet> triplets);

/// `standard` drives Coh(anchor, positive) above Coh(anchor, negative) by
/// the margin; `as_printed` swaps the two scores.
enum class TripletOrientation { standard, as_printed };

struct TripletLoss {
  double loss = 0.0;
  MlpGrad grad;
};

/// max(0, margin + Coh(a, n) - Coh(a, p)) and its subgradient (zero at the
/// kink).
TripletLoss triplet_loss(const CoherenceModel& m, const Triplet& t, double margin,
                         TripletOrientation orientation = TripletOrientation::standard);

struct LabeledPair {
  SentenceVector first;
  SentenceVector second;
  bool coherent = false;
};

/// (anchor, positive) labeled coherent and (anchor, negative) labeled
/// incoherent for every triplet: balanced by construction.
std::vector<LabeledPair> evaluation_pairs(std::span<const Triplet> triplets);

struct ClassificationReport {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double threshold = 0.5;
  std::size_t true_positive = 0;
  std::size_t false_positive = 0;
  std::size_t false_negative = 0;
  std::size_t true_negative = 0;
};

/// A pair is predicted coherent iff its score exceeds `threshold`.
ClassificationReport classify_pairs(const CoherenceModel& m, std::span<const LabeledPair> pairs,
                                    double threshold);

/// Best-F threshold over {0.05, 0.10, ..., 0.95}; earliest wins ties.
double select_threshold(const CoherenceModel& m, std::span<const LabeledPair> dev);

struct CoherenceTrainReport {
  std::vector<double> epoch_loss;  // mean triplet loss before each update
  double threshold = 0.5;
  ClassificationReport test;
};

struct CoherenceTrainResult {
  CoherenceModel model;
  CoherenceTrainReport report;
};

/// Full-batch gradient descent on the mean triplet loss, starting from
/// `init`. Uses margin, lr_coherence and coherence_epochs from `config`.
CoherenceTrainResult train_coherence(CoherenceModel init, std::span<const Triplet> train,
                                     std::span<const Triplet> dev, std::span<const Triplet> test,
                                     const ControlConfig& config);

struct CoherenceThresholds {
  double t1 = 0.0;
  double t2 = 1.0;
};

struct ThresholdCalibration {
  CoherenceThresholds thresholds;
  bool ok = false;  // false when t1 >= t2
  double incoherent_mean = 0.0;
  double positive_mean = 0.0;
  double redundant_mean = 0.0;
};

using VectorPair = std::pair<SentenceVector, SentenceVector>;

/// Diagnostic only. t1 and t2 are midpoints of the mean cosine of the
/// incoherent/positive and positive/redundant pair sets.
ThresholdCalibration calibrate_thresholds(std::span<const VectorPair> positive_pairs,
                                          std::span<const VectorPair> incoherent_pairs,
                                          std::span<const VectorPair> redundant_pairs);

}  // namespace exrw
