#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "exrw/coherence.hpp"
#include "exrw/control.hpp"
#include "exrw/coverage.hpp"

namespace exrw {

struct PolicyModels {
  CoverageModel coverage;
  CoherenceModel coherence;

  static PolicyModels zeros(int dim) { return {CoverageModel::zeros(dim), CoherenceModel::zeros(dim)}; }
  static PolicyModels random(int dim, Rng& rng) {
    auto cov = CoverageModel::random(dim, rng);
    auto coh = CoherenceModel::random(dim, rng);
    return {std::move(cov), std::move(coh)};
  }

  bool operator==(const PolicyModels&) const = default;
};

struct SummaryState {
  std::vector<std::size_t> selected;

  std::size_t step() const { return selected.size(); }
  bool contains(std::size_t index) const;
};

struct TrajectoryStep {
  std::size_t index = 0;
  double prob = 1.0;
  std::optional<double> reward;  // r_t
};

struct Trajectory {
  std::string cluster_id;
  std::vector<TrajectoryStep> steps;
  std::optional<double> final_reward;  // R_tau
  int tn = 0;                          // sentence budget after capping at N

  std::vector<std::size_t> indices() const;
};

enum class ExtractionMode { greedy, sample };

ExtractionMode parse_extraction_mode(std::string_view name);

/// Pair scores of one cluster under frozen models. Scores do not depend on
/// the summary state, so each trajectory needs them once.
struct PairTables {
  Eigen::MatrixXd coverage;   // (i, j) = pair_coverage(x_i, x_j)
  Eigen::MatrixXd coherence;  // (p, i) = coherence_score(x_p, x_i)

  static PairTables compute(const PolicyModels& models, const Eigen::MatrixXd& vectors);
  Eigen::Index size() const { return coverage.rows(); }
};

/// cl1 * coverage_gain(x_i, unselected minus x_i) + cl2 * Coh(x_prev, x_i),
/// with no coherence term on the first step. `vectors` holds one sentence
/// per column.
double selection_logit(const PolicyModels& models, const ControlConfig& config, std::size_t candidate,
                       const SummaryState& state, const Eigen::MatrixXd& vectors);
double selection_logit(const PairTables& tables, const ControlConfig& config, std::size_t candidate,
                       const SummaryState& state);

struct ActionDistribution {
  std::vector<std::size_t> candidates;  // ascending sentence indices
  Eigen::VectorXd logits;
  Eigen::VectorXd probs;

  /// Probability of `index`, 0 when it is not a candidate.
  double prob_of(std::size_t index) const;
};

/// Softmax (max-subtracted) over the logits of every unselected sentence.
ActionDistribution action_distribution(const PolicyModels& models, const ControlConfig& config,
                                       const SummaryState& state, const Eigen::MatrixXd& vectors);
ActionDistribution action_distribution(const PairTables& tables, const ControlConfig& config,
                                       const SummaryState& state);

/// Population variance of cosine similarity over all unordered column pairs.
double pairwise_similarity_variance(const Eigen::MatrixXd& vectors);

/// floor(k + c * variance) clamped to [1, max_tn]; 1 for fewer than two
/// vectors. The extractor further caps the budget at N.
int num_sentences(const Eigen::MatrixXd& vectors, double k, double c, int max_tn);

Trajectory extract_trajectory(const PolicyModels& models, const ControlConfig& config,
                              const Eigen::MatrixXd& vectors, std::string cluster_id, ExtractionMode mode,
                              std::uint64_t seed);

/// Same as above with tables already computed for `vectors`.
Trajectory extract_trajectory(const PairTables& tables, const ControlConfig& config,
                              const Eigen::MatrixXd& vectors, std::string cluster_id, ExtractionMode mode,
                              std::uint64_t seed);

/// `{"cluster_id":..., "steps":[{"index":i,"prob":p}], "tn":TN}` plus one newline.
void write_trajectory_jsonl(std::ostream& out, const Trajectory& trajectory);

}  // namespace exrw
