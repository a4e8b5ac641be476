#include "exrw/trainer.hpp"

#include <cmath>

namespace exrw {

namespace {

void require_rewards(const Trajectory& trajectory, bool need_final) {
  if (trajectory.steps.empty()) throw std::invalid_argument("trajectory has no steps");
  if (need_final && !trajectory.final_reward) throw std::invalid_argument("trajectory has no final reward");
  for (const auto& s : trajectory.steps) {
    if (!s.reward) throw std::invalid_argument("trajectory step has no reward");
    if (!(s.prob > 0.0) || s.prob > 1.0) {
      throw std::domain_error("trajectory records action probability " + std::to_string(s.prob));
    }
  }
}

void attach_rewards(Trajectory& trajectory, const RolloutReward& reward) {
  trajectory.final_reward = reward.final_reward;
  for (std::size_t t = 0; t < trajectory.steps.size(); ++t) trajectory.steps[t].reward = reward.step_rewards.at(t);
}

std::uint64_t rollout_seed(std::uint64_t seed, int epoch, std::size_t cluster) {
  return mix_seed(mix_seed(seed, static_cast<std::uint64_t>(epoch)), cluster);
}

}  // namespace

ClusterContext prepare_cluster(const ClusterRecord& record, const EmbeddingProvider& provider) {
  ClusterContext ctx;
  ctx.cluster_id = record.id;
  ctx.sentences.reserve(record.sentences.size());
  for (const auto& s : record.sentences) ctx.sentences.push_back(s.text);
  ctx.vectors = embed_columns(provider, ctx.sentences);
  if (record.reference_summary && !normalize_text(*record.reference_summary).empty()) {
    ctx.reference = ReferenceTarget::make(*record.reference_summary, provider);
    ctx.step_rewards.resize(static_cast<Eigen::Index>(ctx.sentences.size()));
    for (std::size_t i = 0; i < ctx.sentences.size(); ++i) {
      const auto col = static_cast<Eigen::Index>(i);
      ctx.step_rewards[col] = score_text(ctx.sentences[i], ctx.vectors.col(col), *ctx.reference).total;
    }
  }
  return ctx;
}

std::vector<ClusterContext> prepare_clusters(std::span<const ClusterRecord> records,
                                             const EmbeddingProvider& provider) {
  std::vector<ClusterContext> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(prepare_cluster(r, provider));
  return out;
}

TrajectoryLoss trajectory_loss(const Trajectory& trajectory, double lambda, RegressionSign sign) {
  require_rewards(trajectory, true);
  const double big_r = *trajectory.final_reward;
  const double tn = static_cast<double>(trajectory.steps.size());
  const double s = sign == RegressionSign::literal ? 1.0 : -1.0;

  TrajectoryLoss out;
  double log_sum = 0.0;
  double sq_sum = 0.0;
  for (const auto& step : trajectory.steps) {
    const double err = step.prob - *step.reward;
    log_sum += std::log(step.prob);
    sq_sum += err * err;
    out.d_prob.push_back(-big_r / step.prob - s * lambda * 2.0 * err / tn);
  }
  out.loss = -big_r * log_sum - s * lambda * sq_sum / tn;
  return out;
}

TrajectoryLoss regression_loss(const Trajectory& trajectory, double lambda) {
  require_rewards(trajectory, false);
  const double tn = static_cast<double>(trajectory.steps.size());
  TrajectoryLoss out;
  double sq_sum = 0.0;
  for (const auto& step : trajectory.steps) {
    const double err = step.prob - *step.reward;
    sq_sum += err * err;
    out.d_prob.push_back(lambda * 2.0 * err / tn);
  }
  out.loss = lambda * sq_sum / tn;
  return out;
}

std::vector<double> replay_probabilities(const PolicyModels& models, const ControlConfig& config,
                                         const Eigen::MatrixXd& vectors, std::span<const std::size_t> indices) {
  const auto tables = PairTables::compute(models, vectors);
  SummaryState state;
  std::vector<double> probs;
  probs.reserve(indices.size());
  for (auto index : indices) {
    probs.push_back(action_distribution(tables, config, state).prob_of(index));
    state.selected.push_back(index);
  }
  return probs;
}

PolicyGradient policy_gradient(const PolicyModels& models, const ControlConfig& config,
                               const Eigen::MatrixXd& vectors, const Trajectory& trajectory,
                               std::span<const double> d_prob) {
  if (d_prob.size() != trajectory.steps.size()) throw std::invalid_argument("policy_gradient: step count mismatch");
  const auto n = vectors.cols();
  const auto tables = PairTables::compute(models, vectors);

  // Upstream weight on every pair score, accumulated over steps.
  Eigen::MatrixXd cov_weight = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd coh_weight = Eigen::MatrixXd::Zero(n, n);

  SummaryState state;
  for (std::size_t t = 0; t < trajectory.steps.size(); ++t) {
    const auto chosen = trajectory.steps[t].index;
    const auto dist = action_distribution(tables, config, state);
    const double pi = dist.prob_of(chosen);
    const auto remaining = static_cast<double>(dist.candidates.size());

    for (std::size_t c = 0; c < dist.candidates.size(); ++c) {
      const auto cand = dist.candidates[c];
      const double indicator = cand == chosen ? 1.0 : 0.0;
      const double dz = d_prob[t] * pi * (indicator - dist.probs[static_cast<Eigen::Index>(c)]);
      const auto i = static_cast<Eigen::Index>(cand);
      if (remaining > 1.0) {
        const double w = dz * config.cl1 * 0.5 / (remaining - 1.0);
        for (auto other : dist.candidates) {
          if (other != cand) cov_weight(i, static_cast<Eigen::Index>(other)) += w;
        }
      }
      if (state.step() > 0) coh_weight(static_cast<Eigen::Index>(state.selected.back()), i) += dz * config.cl2;
    }
    state.selected.push_back(chosen);
  }

  const auto in_dim = models.coverage.forward.in_dim();
  PolicyGradient grad{MlpGrad::zeros(in_dim), MlpGrad::zeros(in_dim), MlpGrad::zeros(in_dim)};
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (const double w = cov_weight(i, j); w != 0.0) {
        mlp_backward_into(models.coverage.forward, pair_features(vectors.col(i), vectors.col(j)), w,
                          grad.coverage_forward);
        mlp_backward_into(models.coverage.backward, pair_features(vectors.col(j), vectors.col(i)), w,
                          grad.coverage_backward);
      }
      if (const double w = coh_weight(i, j); w != 0.0) {
        mlp_backward_into(models.coherence.params, pair_features(vectors.col(i), vectors.col(j)), w, grad.coherence);
      }
    }
  }
  return grad;
}

RewardFn make_rewrite_reward(const Rewriter& rewriter, const EmbeddingProvider& provider) {
  return [&rewriter, &provider](const ClusterContext& ctx, const Trajectory& traj) -> std::optional<RolloutReward> {
    if (!ctx.reference) throw std::invalid_argument("cluster " + ctx.cluster_id + " has no reference summary");
    RewriteRequest request;
    for (auto i : traj.indices()) request.sentences.push_back(ctx.sentences[i]);
    RewriteResult rewritten;
    try {
      rewritten = rewriter.rewrite(request);
    } catch (const RewriteError&) {
      return std::nullopt;
    }
    RolloutReward reward;
    reward.final_reward = score_text(rewritten.text, provider.embed_text(rewritten.text), *ctx.reference).total;
    for (auto i : traj.indices()) reward.step_rewards.push_back(ctx.step_rewards[static_cast<Eigen::Index>(i)]);
    return reward;
  };
}

void write_train_log(std::ostream& out, const TrainReport& report) {
  for (int e = 0; e < report.epochs; ++e) {
    const auto i = static_cast<std::size_t>(e);
    nlohmann::json row{{"phase", report.phase == TrainPhase::pretrain ? "pretrain" : "rl"},
                       {"epoch", e},
                       {"mean_loss", report.mean_loss[i]},
                       {"mean_reward", report.mean_reward[i]},
                       {"skipped", report.skipped[i]}};
    out << row.dump() << '\n';
  }
}

TrainReport pretrain_policy(std::span<const ClusterContext> clusters, PolicyModels& models,
                            const ControlConfig& config) {
  for (const auto& ctx : clusters) {
    if (!ctx.reference) throw std::invalid_argument("pretrain: cluster " + ctx.cluster_id + " has no reference summary");
  }
  TrainReport report;
  report.phase = TrainPhase::pretrain;
  for (int epoch = 0; epoch < config.pretrain_epochs; ++epoch) {
    double loss_sum = 0.0;
    double reward_sum = 0.0;
    std::size_t count = 0;
    for (std::size_t ci = 0; ci < clusters.size(); ++ci) {
      const auto& ctx = clusters[ci];
      if (ctx.size() == 0) continue;
      const auto tables = PairTables::compute(models, ctx.vectors);
      const auto in_dim = models.coverage.forward.weights.size();
      MlpGrad forward = MlpGrad::zeros(in_dim);
      MlpGrad backward = MlpGrad::zeros(in_dim);
      const double scale = 1.0 / static_cast<double>(config.batch_size);
      for (int b = 0; b < config.batch_size; ++b) {
        std::uint64_t seed = rollout_seed(config.seed, epoch, ci);
        if (b > 0) seed = mix_seed(seed, static_cast<std::uint64_t>(b));
        auto traj = extract_trajectory(tables, config, ctx.vectors, ctx.cluster_id, ExtractionMode::sample, seed);
        double step_mean = 0.0;
        for (auto& step : traj.steps) {
          step.reward = ctx.step_rewards[static_cast<Eigen::Index>(step.index)];
          step_mean += *step.reward;
        }
        auto loss = regression_loss(traj, config.lambda);
        for (auto& d : loss.d_prob) d *= scale;
        const auto grad = policy_gradient(models, config, ctx.vectors, traj, loss.d_prob);
        forward += grad.coverage_forward;
        backward += grad.coverage_backward;
        loss_sum += loss.loss * scale;
        reward_sum += step_mean / static_cast<double>(traj.steps.size()) * scale;
      }
      apply_gradient(models.coverage.forward, forward, config.lr_pretrain);
      apply_gradient(models.coverage.backward, backward, config.lr_pretrain);
      ++count;
    }
    const double denom = count > 0 ? static_cast<double>(count) : 1.0;
    report.mean_loss.push_back(loss_sum / denom);
    report.mean_reward.push_back(reward_sum / denom);
    report.skipped.push_back(0);
    ++report.epochs;
  }
  return report;
}

TrainReport train_rl(std::span<const ClusterContext> clusters, PolicyModels& models, const ControlConfig& config,
                     const RewardFn& reward) {
  TrainReport report;
  report.phase = TrainPhase::rl;
  for (int epoch = 0; epoch < config.rl_epochs; ++epoch) {
    double loss_sum = 0.0;
    double reward_sum = 0.0;
    int count = 0;
    int skipped = 0;
    int attempted = 0;
    for (std::size_t ci = 0; ci < clusters.size(); ++ci) {
      const auto& ctx = clusters[ci];
      if (ctx.size() == 0) continue;
      ++attempted;
      auto traj = extract_trajectory(models, config, ctx.vectors, ctx.cluster_id, ExtractionMode::sample,
                                     rollout_seed(config.seed, epoch, ci));
      const auto scored = reward(ctx, traj);
      if (!scored) {
        ++skipped;
        continue;
      }
      attach_rewards(traj, *scored);
      const auto loss = trajectory_loss(traj, config.lambda, config.regression_sign);
      const auto grad = policy_gradient(models, config, ctx.vectors, traj, loss.d_prob);
      apply_gradient(models.coverage.forward, grad.coverage_forward, config.lr_rl);
      apply_gradient(models.coverage.backward, grad.coverage_backward, config.lr_rl);
      apply_gradient(models.coherence.params, grad.coherence, config.lr_rl);

      loss_sum += loss.loss;
      reward_sum += scored->final_reward;
      ++count;
    }
    if (attempted > 0 && 2 * skipped > attempted) {
      throw TrainingAborted("train_rl: " + std::to_string(skipped) + " of " + std::to_string(attempted) +
                            " rollouts failed to rewrite in epoch " + std::to_string(epoch));
    }
    const double denom = count > 0 ? static_cast<double>(count) : 1.0;
    report.mean_loss.push_back(loss_sum / denom);
    report.mean_reward.push_back(reward_sum / denom);
    report.skipped.push_back(skipped);
    ++report.epochs;
  }
  return report;
}

SummaryOutput summarize_cluster(const PairTables& tables, const ClusterContext& cluster, const ControlConfig& config,
                                ExtractionMode mode, std::uint64_t seed, const Rewriter& rewriter) {
  SummaryOutput out;
  out.trajectory = extract_trajectory(tables, config, cluster.vectors, cluster.cluster_id, mode, seed);
  if (out.trajectory.steps.empty()) return out;
  RewriteRequest request;
  for (auto i : out.trajectory.indices()) request.sentences.push_back(cluster.sentences[i]);
  out.text = rewriter.rewrite(request).text;
  return out;
}

GridResult grid_search(std::span<const ClusterContext> dev, const GridSpec& grid, const PolicyModels& models,
                       const ControlConfig& base, const Rewriter& rewriter) {
  for (const auto* dim : {&grid.cl1, &grid.cl2, &grid.k, &grid.c, &grid.lambda}) {
    if (dim->empty()) throw std::invalid_argument("grid_search: empty grid dimension");
  }
  for (const auto& ctx : dev) {
    if (!ctx.reference) throw std::invalid_argument("grid_search: cluster " + ctx.cluster_id + " has no reference");
  }

  std::vector<PairTables> tables;
  tables.reserve(dev.size());
  for (const auto& ctx : dev) tables.push_back(PairTables::compute(models, ctx.vectors));

  GridResult result;
  bool first = true;
  for (double cl1 : grid.cl1) {
    for (double cl2 : grid.cl2) {
      for (double k : grid.k) {
        for (double c : grid.c) {
          for (double lambda : grid.lambda) {
            ControlConfig cfg = base;
            cfg.cl1 = cl1;
            cfg.cl2 = cl2;
            cfg.k = k;
            cfg.c = c;
            cfg.lambda = lambda;

            double total = 0.0;
            for (std::size_t i = 0; i < dev.size(); ++i) {
              const auto summary = summarize_cluster(tables[i], dev[i], cfg, ExtractionMode::greedy, cfg.seed, rewriter);
              const auto tokens = tokenize(summary.text);
              total += rouge_n(tokens, dev[i].reference->tokens, 2).f1 + rouge_l(tokens, dev[i].reference->tokens).f1;
            }
            const double objective = dev.empty() ? 0.0 : total / static_cast<double>(dev.size());
            result.table.push_back({cfg, objective});
            if (first || objective > result.best_objective) {
              result.best = cfg;
              result.best_objective = objective;
              first = false;
            }
          }
        }
      }
    }
  }
  return result;
}

}  // namespace exrw
