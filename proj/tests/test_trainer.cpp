#include <numeric>
#include <sstream>

#include "doctest.h"
#include "exrw/trainer.hpp"
#include "support/bandit.hpp"
#include "support/gradient_check.hpp"
#include "support/synthetic.hpp"

using namespace exrw;

namespace {

Trajectory one_step(double prob, double reward, double final_reward) {
  Trajectory t;
  t.steps = {{0, prob, reward}};
  t.final_reward = final_reward;
  t.tn = 1;
  return t;
}

// Synthetic context with random embeddings and random per-sentence rewards.
ClusterContext synthetic_context(int n, int dim, Rng& rng, const EmbeddingProvider& provider) {
  ClusterContext ctx;
  ctx.cluster_id = "syn" + std::to_string(rng.below(1000000));
  for (int i = 0; i < n; ++i) ctx.sentences.push_back("Sentence " + std::to_string(i) + ".");
  ctx.vectors = testing::random_cluster(n, dim, rng);
  ctx.reference = ReferenceTarget::make("Reference text.", provider);
  ctx.step_rewards.resize(n);
  for (int i = 0; i < n; ++i) ctx.step_rewards[i] = rng.uniform(0, 1);
  return ctx;
}

// Relevant sentences share a planted direction and earn step reward 1.
ClusterContext planted_context(int n, int relevant, const Eigen::VectorXd& direction, Rng& rng,
                               const EmbeddingProvider& provider) {
  const int dim = static_cast<int>(direction.size());
  ClusterContext ctx;
  ctx.cluster_id = "planted" + std::to_string(rng.below(1000000));
  for (int i = 0; i < n; ++i) ctx.sentences.push_back("Sentence " + std::to_string(i) + ".");
  ctx.vectors = testing::random_cluster(n, dim, rng);
  ctx.reference = ReferenceTarget::make("Reference text.", provider);
  ctx.step_rewards = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < relevant; ++i) {
    ctx.vectors.col(i) = (ctx.vectors.col(i) + 2.0 * direction).normalized();
    ctx.step_rewards[i] = 1.0;
  }
  return ctx;
}

double slope(const std::vector<double>& y) {
  const double n = static_cast<double>(y.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double x = static_cast<double>(i);
    sx += x;
    sy += y[i];
    sxx += x * x;
    sxy += x * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

class FailingRewriter final : public Rewriter {
 public:
  RewriteResult rewrite(const RewriteRequest&) const override { throw RewriteError("down", 503); }
};

}  // namespace

TEST_CASE("trajectory loss scalar examples") {
  CHECK(trajectory_loss(one_step(0.5, 0.5, 0.0), 2.0).loss == doctest::Approx(0.0));
  CHECK(trajectory_loss(one_step(0.5, 0.3, 0.0), 2.0).loss == doctest::Approx(-0.08));
  CHECK(trajectory_loss(one_step(0.5, 0.3, 0.0), 2.0, RegressionSign::penalty).loss == doctest::Approx(0.08));
  CHECK(trajectory_loss(one_step(0.5, 0.3, 1.0), 0.0).loss == doctest::Approx(-std::log(0.5)));
  CHECK(regression_loss(one_step(0.5, 0.3, 0.0), 2.0).loss == doctest::Approx(0.08));

  Trajectory missing = one_step(0.5, 0.3, 0.0);
  missing.final_reward.reset();
  CHECK_THROWS_AS(trajectory_loss(missing, 1.0), std::invalid_argument);
  CHECK_NOTHROW(regression_loss(missing, 1.0));
  missing.steps[0].reward.reset();
  CHECK_THROWS_AS(regression_loss(missing, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(trajectory_loss(one_step(0.0, 0.3, 1.0), 1.0), std::domain_error);
}

TEST_CASE("d_prob matches differences of the scalar loss") {
  Rng rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    Trajectory t;
    const int steps = 1 + static_cast<int>(rng.below(4));
    for (int i = 0; i < steps; ++i) t.steps.push_back({static_cast<std::size_t>(i), rng.uniform(0.05, 1.0), rng.uniform(0, 1)});
    t.final_reward = rng.uniform(0, 1);
    const auto sign = trial % 2 ? RegressionSign::literal : RegressionSign::penalty;
    const auto loss = trajectory_loss(t, 0.7, sign);
    for (int i = 0; i < steps; ++i) {
      Trajectory up = t, down = t;
      up.steps[i].prob += 1e-6;
      down.steps[i].prob -= 1e-6;
      const double numeric = (trajectory_loss(up, 0.7, sign).loss - trajectory_loss(down, 0.7, sign).loss) / 2e-6;
      CHECK(loss.d_prob[i] == doctest::Approx(numeric).epsilon(1e-5));
    }
  }
}

TEST_CASE("full-path gradient matches central differences") {
  Rng rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const auto sign = trial % 2 ? RegressionSign::literal : RegressionSign::penalty;
    CHECK(testing::full_path_relative_error(rng, sign) < 1e-3);
  }
}

TEST_CASE("replay reproduces recorded probabilities") {
  Rng rng(3);
  const auto v = testing::random_cluster(6, 4, rng);
  const auto models = PolicyModels::random(4, rng);
  ControlConfig cfg;
  cfg.k = 4;
  cfg.c = 0;
  const auto traj = extract_trajectory(models, cfg, v, "r", ExtractionMode::sample, 5);
  const auto idx = traj.indices();
  const auto probs = replay_probabilities(models, cfg, v, idx);
  for (std::size_t i = 0; i < probs.size(); ++i) CHECK(probs[i] == traj.steps[i].prob);
}

TEST_CASE("prepare_cluster") {
  FallbackEmbedder e(16);
  const auto record = make_cluster("c", {{"d", "Rain fell. Rivers rose."}}, "Rain fell. Rivers rose.");
  const auto ctx = prepare_cluster(record, e);
  CHECK(ctx.size() == 2);
  CHECK(ctx.vectors.cols() == 2);
  REQUIRE(ctx.reference.has_value());
  REQUIRE(ctx.step_rewards.size() == 2);
  CHECK(ctx.step_rewards[0] == doctest::Approx(step_reward("Rain fell.", "Rain fell. Rivers rose.", e).total));
  const auto bare = prepare_cluster(make_cluster("b", {{"d", "Only text."}}), e);
  CHECK_FALSE(bare.reference.has_value());
  CHECK(bare.step_rewards.size() == 0);
}

TEST_CASE("tabular oracle converges for both regression signs") {
  for (auto sign : {RegressionSign::literal, RegressionSign::penalty}) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const int at = testing::tabular_bandit(seed, sign, 0.5, 0.05 * 10, 3, 2, 2000);
      CHECK(at > 0);
    }
  }
}

TEST_CASE("bandit: REINFORCE learns the designated sentence") {
  FallbackEmbedder e(16);
  IdentityRewriter identity;
  const auto ctx = testing::bandit_cluster(e);
  REQUIRE(ctx.size() == 3);
  const std::vector<ClusterContext> clusters{ctx};
  for (auto sign : {RegressionSign::literal, RegressionSign::penalty}) {
    for (std::uint64_t seed = 0; seed < 2; ++seed) {
      const auto cfg = testing::bandit_config(seed, sign);
      Rng rng(seed);
      auto models = PolicyModels::random(16, rng);
      const double before = testing::first_step_prob(models, cfg, ctx, 2);
      train_rl(clusters, models, cfg, testing::bandit_reward(identity, 2));
      const double after = testing::first_step_prob(models, cfg, ctx, 2);
      CHECK(before < 0.6);
      CHECK(after > 0.9);
    }
  }
}

TEST_CASE("freeze contract") {
  FallbackEmbedder e(8);
  Rng rng(4);
  std::vector<ClusterContext> clusters;
  for (int i = 0; i < 4; ++i) clusters.push_back(synthetic_context(5, 8, rng, e));
  const auto vectors_before = clusters[0].vectors;
  auto models = PolicyModels::random(8, rng);
  const auto start = models;

  ControlConfig cfg;
  cfg.lr_pretrain = 0.5;
  cfg.pretrain_epochs = 3;
  pretrain_policy(clusters, models, cfg);
  CHECK(models.coherence == start.coherence);
  CHECK_FALSE(models.coverage == start.coverage);
  CHECK(clusters[0].vectors == vectors_before);

  IdentityRewriter identity;
  cfg.lr_rl = 0.1;
  cfg.rl_epochs = 2;
  const auto pretrained = models;
  train_rl(clusters, models, cfg, testing::bandit_reward(identity, 0));
  CHECK_FALSE(models == pretrained);
  CHECK(clusters[0].vectors == vectors_before);
}

TEST_CASE("pretraining reduces the mean regression loss") {
  FallbackEmbedder e(8);
  constexpr int kSeeds = 5;
  constexpr int kEpochs = 5;
  std::vector<double> mean(kEpochs, 0.0);
  for (int seed = 0; seed < kSeeds; ++seed) {
    Rng rng(100 + seed);
    const auto direction = testing::random_unit(8, rng);
    std::vector<ClusterContext> clusters;
    for (int i = 0; i < 5; ++i) clusters.push_back(planted_context(6, 1, direction, rng, e));
    auto models = PolicyModels::random(8, rng);
    ControlConfig cfg;
    cfg.seed = static_cast<std::uint64_t>(seed);
    cfg.cl1 = 20;
    cfg.k = 1;
    cfg.c = 0;
    cfg.lr_pretrain = 0.5;
    cfg.batch_size = 16;
    cfg.pretrain_epochs = kEpochs;
    const auto report = pretrain_policy(clusters, models, cfg);
    REQUIRE(report.mean_loss.size() == kEpochs);
    for (int ep = 0; ep < kEpochs; ++ep) mean[ep] += report.mean_loss[ep] / kSeeds;
  }
  for (int ep = 1; ep < kEpochs; ++ep) CHECK(mean[ep] <= mean[ep - 1]);
  CHECK(mean.back() < mean.front());
}

TEST_CASE("pretraining with batch_size 1 matches the single-draw loop") {
  FallbackEmbedder e(8);
  Rng rng(11);
  std::vector<ClusterContext> clusters;
  for (int i = 0; i < 3; ++i) clusters.push_back(synthetic_context(5, 8, rng, e));
  const auto start = PolicyModels::random(8, rng);
  ControlConfig cfg;
  cfg.lr_pretrain = 0.3;
  cfg.pretrain_epochs = 2;
  auto a = start;
  auto b = start;
  pretrain_policy(clusters, a, cfg);
  cfg.batch_size = 2;
  pretrain_policy(clusters, b, cfg);
  CHECK_FALSE(a == b);
  cfg.batch_size = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("RL reward trend on planted relevance") {
  FallbackEmbedder e(8);
  double mean_slope = 0;
  for (int seed = 0; seed < 5; ++seed) {
    Rng rng(200 + seed);
    const auto direction = testing::random_unit(8, rng);
    std::vector<ClusterContext> clusters;
    for (int i = 0; i < 8; ++i) clusters.push_back(planted_context(6, 2, direction, rng, e));
    RewardFn reward = [](const ClusterContext& ctx, const Trajectory& t) -> std::optional<RolloutReward> {
      RolloutReward r;
      for (auto i : t.indices()) r.step_rewards.push_back(ctx.step_rewards[static_cast<Eigen::Index>(i)]);
      r.final_reward = std::accumulate(r.step_rewards.begin(), r.step_rewards.end(), 0.0) /
                       static_cast<double>(r.step_rewards.size());
      return r;
    };
    auto models = PolicyModels::random(8, rng);
    ControlConfig cfg;
    cfg.seed = static_cast<std::uint64_t>(seed);
    cfg.k = 2;
    cfg.c = 0;
    cfg.lr_rl = 0.5;
    cfg.rl_epochs = 20;
    const auto report = train_rl(clusters, models, cfg, reward);
    REQUIRE(report.mean_reward.size() == 20);
    mean_slope += slope(report.mean_reward) / 5;
  }
  CHECK(mean_slope >= 0.0);
}

TEST_CASE("failed rewrites are skipped and abort the epoch past half") {
  FallbackEmbedder e(8);
  Rng rng(5);
  std::vector<ClusterContext> clusters;
  for (int i = 0; i < 4; ++i) clusters.push_back(synthetic_context(4, 8, rng, e));
  auto models = PolicyModels::random(8, rng);
  ControlConfig cfg;
  cfg.rl_epochs = 1;

  FailingRewriter failing;
  CHECK_THROWS_AS(train_rl(clusters, models, cfg, make_rewrite_reward(failing, e)), TrainingAborted);

  int calls = 0;
  RewardFn half = [&calls](const ClusterContext&, const Trajectory& t) -> std::optional<RolloutReward> {
    if (calls++ % 2 == 0) return std::nullopt;
    return RolloutReward{0.5, std::vector<double>(t.steps.size(), 0.5)};
  };
  const auto report = train_rl(clusters, models, cfg, half);
  CHECK(report.skipped == std::vector<int>{2});

  std::ostringstream log;
  write_train_log(log, report);
  const auto row = nlohmann::json::parse(log.str());
  CHECK(row["phase"] == "rl");
  CHECK(row["skipped"] == 2);
}

TEST_CASE("rewrite reward uses the rewritten text") {
  FallbackEmbedder e(16);
  IdentityRewriter identity;
  const auto ctx = prepare_cluster(make_cluster("c", {{"d", "Rain fell. Rivers rose. Cats slept."}}, "Rain fell. Rivers rose."), e);
  Trajectory t;
  t.steps = {{0, 0.5, std::nullopt}, {1, 0.5, std::nullopt}};
  const auto r = make_rewrite_reward(identity, e)(ctx, t);
  REQUIRE(r.has_value());
  CHECK(r->final_reward == doctest::Approx(1.0));
  CHECK(r->step_rewards[1] == ctx.step_rewards[1]);
}

TEST_CASE("grid search distinguishes coherence weights") {
  FallbackEmbedder e(32);
  IdentityRewriter identity;
  const auto record = make_cluster(
      "g", {{"d", "Alpha beta delta. Noise one here. Noise two there. Alpha beta delta gamma."}},
      "Alpha beta delta. Alpha beta delta gamma.");
  const std::vector<ClusterContext> dev{prepare_cluster(record, e)};

  auto models = PolicyModels::zeros(32);
  // coherence rewards similar successors through the elementwise-product block
  models.coherence.params.weights.segment(2 * 32, 32).setConstant(8.0);
  GridSpec grid{{1.0}, {0.0, 5.0}, {2.0}, {0.0}, {0.5}};
  const auto result = grid_search(dev, grid, models, ControlConfig{}, identity);
  REQUIRE(result.table.size() == 2);
  CHECK(result.table[0].config.cl2 == 0.0);
  CHECK(result.table[0].objective != result.table[1].objective);
  CHECK(result.best.cl2 == 5.0);

  GridSpec flat{{1.0, 1.0}, {0.0}, {2.0}, {0.0}, {0.5}};
  const auto tie = grid_search(dev, flat, models, ControlConfig{}, identity);
  CHECK(tie.best_objective == tie.table[0].objective);
  CHECK_THROWS_AS(grid_search(dev, GridSpec{}, models, ControlConfig{}, identity), std::invalid_argument);
}
