#include "exrw/coherence.hpp"

#include <fstream>
#include <stdexcept>

namespace exrw {

double coherence_score(const CoherenceModel& m, const SentenceVector& x1, const SentenceVector& x2) {
  return mlp_forward(m.params, pair_features(x1, x2));
}

Eigen::MatrixXd coherence_table(const CoherenceModel& m, const Eigen::MatrixXd& vectors) {
  const auto n = vectors.cols();
  Eigen::MatrixXd table(n, n);
  for (Eigen::Index p = 0; p < n; ++p) {
    for (Eigen::Index i = 0; i < n; ++i) {
      table(p, i) = mlp_forward(m.params, pair_features(vectors.col(p), vectors.col(i)));
    }
  }
  return table;
}

std::string_view to_string(NegativeKind kind) {
  return kind == NegativeKind::random_source ? "random_source" : "self_pair";
}

TripletSet build_triplets(std::span<const ClusterRecord> clusters, const EmbeddingProvider& provider,
                          std::uint64_t seed) {
  TripletSet out;
  Rng rng(seed);
  for (const auto& cluster : clusters) {
    if (!cluster.reference_summary) {
      ++out.skipped_clusters;
      continue;
    }
    auto summary = split_sentences(*cluster.reference_summary);
    for (auto& s : summary) s = normalize_text(s);
    if (summary.size() < 2 || cluster.sentences.empty()) continue;

    const auto summary_vectors = provider.embed(summary);
    std::vector<std::string> source_texts;
    source_texts.reserve(cluster.sentences.size());
    for (const auto& s : cluster.sentences) source_texts.push_back(s.text);
    const auto source_vectors = provider.embed(source_texts);

    for (std::size_t i = 0; i + 1 < summary.size(); ++i) {
      const auto pick = static_cast<std::size_t>(rng.below(source_vectors.size()));
      out.triplets.push_back({summary_vectors[i], summary_vectors[i + 1], source_vectors[pick],
                              NegativeKind::random_source, summary[i], summary[i + 1], source_texts[pick]});
      out.triplets.push_back({summary_vectors[i], summary_vectors[i + 1], summary_vectors[i],
                              NegativeKind::self_pair, summary[i], summary[i + 1], summary[i]});
    }
  }
  return out;
}

void write_triplets_jsonl(const std::filesystem::path& path, std::span<const Triplet> triplets) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (const auto& t : triplets) {
    nlohmann::json row{{"anchor", t.anchor_text},
                       {"positive", t.positive_text},
                       {"negative", t.negative_text},
                       {"kind", std::string(to_string(t.negative_kind))}};
    out << row.dump() << '\n';
  }
}

TripletLoss triplet_loss(const CoherenceModel& m, const Triplet& t, double margin,
                         TripletOrientation orientation) {
  const auto f_pos = pair_features(t.anchor, t.positive);
  const auto f_neg = pair_features(t.anchor, t.negative);
  double pos = mlp_forward(m.params, f_pos);
  double neg = mlp_forward(m.params, f_neg);
  double sign_pos = -1.0;
  double sign_neg = 1.0;
  if (orientation == TripletOrientation::as_printed) {
    std::swap(pos, neg);
    std::swap(sign_pos, sign_neg);
  }

  TripletLoss out{0.0, MlpGrad::zeros(m.params.in_dim())};
  const double raw = margin + neg - pos;
  if (raw <= 0.0) return out;
  out.loss = raw;
  mlp_backward_into(m.params, f_pos, sign_pos, out.grad);
  mlp_backward_into(m.params, f_neg, sign_neg, out.grad);
  return out;
}

std::vector<LabeledPair> evaluation_pairs(std::span<const Triplet> triplets) {
  std::vector<LabeledPair> pairs;
  pairs.reserve(2 * triplets.size());
  for (const auto& t : triplets) {
    pairs.push_back({t.anchor, t.positive, true});
    pairs.push_back({t.anchor, t.negative, false});
  }
  return pairs;
}

ClassificationReport classify_pairs(const CoherenceModel& m, std::span<const LabeledPair> pairs,
                                    double threshold) {
  ClassificationReport r;
  r.threshold = threshold;
  for (const auto& p : pairs) {
    const bool predicted = coherence_score(m, p.first, p.second) > threshold;
    if (predicted && p.coherent) ++r.true_positive;
    if (predicted && !p.coherent) ++r.false_positive;
    if (!predicted && p.coherent) ++r.false_negative;
    if (!predicted && !p.coherent) ++r.true_negative;
  }
  const auto tp = static_cast<double>(r.true_positive);
  if (r.true_positive + r.false_positive > 0) r.precision = tp / static_cast<double>(r.true_positive + r.false_positive);
  if (r.true_positive + r.false_negative > 0) r.recall = tp / static_cast<double>(r.true_positive + r.false_negative);
  if (r.precision + r.recall > 0) r.f1 = 2 * r.precision * r.recall / (r.precision + r.recall);
  return r;
}

double select_threshold(const CoherenceModel& m, std::span<const LabeledPair> dev) {
  double best_threshold = 0.05;
  double best_f = -1.0;
  for (int step = 1; step <= 19; ++step) {
    const double threshold = 0.05 * step;
    const double f = classify_pairs(m, dev, threshold).f1;
    if (f > best_f) {
      best_f = f;
      best_threshold = threshold;
    }
  }
  return best_threshold;
}

CoherenceTrainResult train_coherence(CoherenceModel model, std::span<const Triplet> train,
                                     std::span<const Triplet> dev, std::span<const Triplet> test,
                                     const ControlConfig& config) {
  if (train.empty()) throw std::invalid_argument("train_coherence: empty train split");
  if (dev.empty()) throw std::invalid_argument("train_coherence: empty dev split");
  if (test.empty()) throw std::invalid_argument("train_coherence: empty test split");

  CoherenceTrainReport report;
  const double scale = 1.0 / static_cast<double>(train.size());
  for (int epoch = 0; epoch < config.coherence_epochs; ++epoch) {
    auto grad = MlpGrad::zeros(model.params.in_dim());
    double loss = 0.0;
    for (const auto& t : train) {
      const auto tl = triplet_loss(model, t, config.margin);
      loss += tl.loss;
      grad += tl.grad;
    }
    report.epoch_loss.push_back(loss * scale);
    grad.d_weights *= scale;
    grad.d_bias *= scale;
    apply_gradient(model.params, grad, config.lr_coherence);
  }

  const auto dev_pairs = evaluation_pairs(dev);
  const auto test_pairs = evaluation_pairs(test);
  report.threshold = select_threshold(model, dev_pairs);
  report.test = classify_pairs(model, test_pairs, report.threshold);
  return {std::move(model), std::move(report)};
}

ThresholdCalibration calibrate_thresholds(std::span<const VectorPair> positive_pairs,
                                          std::span<const VectorPair> incoherent_pairs,
                                          std::span<const VectorPair> redundant_pairs) {
  auto mean_cosine = [](std::span<const VectorPair> pairs, const char* name) {
    if (pairs.empty()) throw std::invalid_argument(std::string("calibrate_thresholds: empty ") + name + " set");
    double sum = 0.0;
    for (const auto& [a, b] : pairs) sum += cosine(a, b);
    return sum / static_cast<double>(pairs.size());
  };

  ThresholdCalibration cal;
  cal.positive_mean = mean_cosine(positive_pairs, "positive");
  cal.incoherent_mean = mean_cosine(incoherent_pairs, "incoherent");
  cal.redundant_mean = mean_cosine(redundant_pairs, "redundant");
  cal.thresholds.t1 = std::clamp(0.5 * (cal.incoherent_mean + cal.positive_mean), 0.0, 1.0);
  cal.thresholds.t2 = std::clamp(0.5 * (cal.positive_mean + cal.redundant_mean), 0.0, 1.0);
  cal.ok = cal.thresholds.t1 < cal.thresholds.t2;
  return cal;
}

}  // namespace exrw
