#pragma once

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "exrw/corpus.hpp"
#include "exrw/metrics.hpp"
#include "exrw/policy.hpp"
#include "exrw/rewrite.hpp"

namespace exrw {

class TrainingAborted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Frozen per-cluster inputs: sentence texts, their embeddings (one per
/// column) and, when a reference exists, the reference target and the
/// per-sentence step reward r_t.
struct ClusterContext {
  std::string cluster_id;
  std::vector<std::string> sentences;
  Eigen::MatrixXd vectors;
  std::optional<ReferenceTarget> reference;
  Eigen::VectorXd step_rewards;

  std::size_t size() const { return sentences.size(); }
};

ClusterContext prepare_cluster(const ClusterRecord& record, const EmbeddingProvider& provider);
std::vector<ClusterContext> prepare_clusters(std::span<const ClusterRecord> records,
                                             const EmbeddingProvider& provider);

struct TrajectoryLoss {
  double loss = 0.0;
  std::vector<double> d_prob;  // dL / d pi(x_t | s_t) per step
};

/// -R * sum log pi_t - s * lambda / TN * sum (pi_t - r_t)^2 with s = +1 for
/// RegressionSign::literal and s = -1 for RegressionSign::penalty. Rewards are
/// constants. Requires R and every r_t.
TrajectoryLoss trajectory_loss(const Trajectory& trajectory, double lambda,
                               RegressionSign sign = RegressionSign::literal);

/// lambda / TN * sum (pi_t - r_t)^2, the pretraining objective.
TrajectoryLoss regression_loss(const Trajectory& trajectory, double lambda);

/// Probabilities the policy assigns to the recorded actions, replayed in order.
std::vector<double> replay_probabilities(const PolicyModels& models, const ControlConfig& config,
                                         const Eigen::MatrixXd& vectors, std::span<const std::size_t> indices);

struct PolicyGradient {
  MlpGrad coverage_forward;
  MlpGrad coverage_backward;
  MlpGrad coherence;
};

/// Backpropagates per-step dL/dpi through the softmax and the logits into
/// the three scorers.
PolicyGradient policy_gradient(const PolicyModels& models, const ControlConfig& config,
                               const Eigen::MatrixXd& vectors, const Trajectory& trajectory,
                               std::span<const double> d_prob);

struct RolloutReward {
  double final_reward = 0.0;
  std::vector<double> step_rewards;  // one per trajectory step
};

/// Returns nullopt when the rollout could not be scored (failed rewrite);
/// such trajectories are skipped, not zero-rewarded.
using RewardFn = std::function<std::optional<RolloutReward>(const ClusterContext&, const Trajectory&)>;

/// Rewrites the extracted sentences and scores the result against the
/// cluster reference; r_t comes from the precomputed step rewards.
RewardFn make_rewrite_reward(const Rewriter& rewriter, const EmbeddingProvider& provider);

enum class TrainPhase { pretrain, rl };

struct TrainReport {
  TrainPhase phase = TrainPhase::pretrain;
  int epochs = 0;
  std::vector<double> mean_loss;
  std::vector<double> mean_reward;
  std::vector<int> skipped;
  std::string checkpoint_path;
};

void write_train_log(std::ostream& out, const TrainReport& report);

/// Fits only the coverage scorers to the per-step rewards with the
/// regression objective, at lr_pretrain for pretrain_epochs epochs. Each
/// epoch samples batch_size trajectories per cluster and takes one step on
/// their mean gradient.
TrainReport pretrain_policy(std::span<const ClusterContext> clusters, PolicyModels& models,
                            const ControlConfig& config);

/// REINFORCE plus regression on both scorers at lr_rl for rl_epochs epochs.
/// Aborts when more than half of an epoch's rollouts fail to score.
TrainReport train_rl(std::span<const ClusterContext> clusters, PolicyModels& models, const ControlConfig& config,
                     const RewardFn& reward);

struct GridSpec {
  std::vector<double> cl1;
  std::vector<double> cl2;
  std::vector<double> k;
  std::vector<double> c;
  std::vector<double> lambda;
};

struct GridRow {
  ControlConfig config;
  double objective = 0.0;  // mean over clusters of ROUGE-2 F1 + ROUGE-L F1
};

struct GridResult {
  ControlConfig best;
  double best_objective = 0.0;
  std::vector<GridRow> table;  // Cartesian order: cl1, cl2, k, c, lambda
};

/// Exhaustive search with greedy extraction and the given rewriter. The
/// first grid point wins ties.
GridResult grid_search(std::span<const ClusterContext> dev, const GridSpec& grid, const PolicyModels& models,
                       const ControlConfig& base, const Rewriter& rewriter);

struct SummaryOutput {
  Trajectory trajectory;
  std::string text;
};

/// Extract then rewrite one cluster.
SummaryOutput summarize_cluster(const PairTables& tables, const ClusterContext& cluster, const ControlConfig& config,
                                ExtractionMode mode, std::uint64_t seed, const Rewriter& rewriter);

}  // namespace exrw
