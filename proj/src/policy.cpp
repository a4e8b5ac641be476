#include "exrw/policy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace exrw {

namespace {

// floor() guard for budgets that are exact integers in real arithmetic but
// land a few ulps below in floating point (e.g. 2 + 9 * (2/9)).
constexpr double kFloorSlack = 1e-9;

std::vector<std::size_t> remaining_indices(std::size_t n, const SummaryState& state) {
  std::vector<std::size_t> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!state.contains(i)) out.push_back(i);
  }
  return out;
}

void check_candidate(std::size_t candidate, std::size_t n, const SummaryState& state) {
  if (candidate >= n) throw std::out_of_range("selection_logit: candidate out of range");
  if (state.contains(candidate)) {
    throw std::invalid_argument("selection_logit: sentence " + std::to_string(candidate) + " already selected");
  }
}

ActionDistribution softmax_over(std::vector<std::size_t> candidates, Eigen::VectorXd logits) {
  ActionDistribution dist;
  dist.candidates = std::move(candidates);
  dist.logits = std::move(logits);
  const double top = dist.logits.maxCoeff();
  dist.probs = (dist.logits.array() - top).exp();
  dist.probs /= dist.probs.sum();
  return dist;
}

}  // namespace

bool SummaryState::contains(std::size_t index) const {
  return std::find(selected.begin(), selected.end(), index) != selected.end();
}

std::vector<std::size_t> Trajectory::indices() const {
  std::vector<std::size_t> out;
  out.reserve(steps.size());
  for (const auto& s : steps) out.push_back(s.index);
  return out;
}

ExtractionMode parse_extraction_mode(std::string_view name) {
  if (name == "greedy") return ExtractionMode::greedy;
  if (name == "sample") return ExtractionMode::sample;
  throw std::invalid_argument("unknown extraction mode: " + std::string(name));
}

PairTables PairTables::compute(const PolicyModels& models, const Eigen::MatrixXd& vectors) {
  return {coverage_table(models.coverage, vectors), coherence_table(models.coherence, vectors)};
}

double selection_logit(const PolicyModels& models, const ControlConfig& config, std::size_t candidate,
                       const SummaryState& state, const Eigen::MatrixXd& vectors) {
  const auto n = static_cast<std::size_t>(vectors.cols());
  check_candidate(candidate, n, state);

  std::vector<SentenceVector> remaining;
  for (auto j : remaining_indices(n, state)) {
    if (j != candidate) remaining.emplace_back(vectors.col(static_cast<Eigen::Index>(j)));
  }
  const SentenceVector xi = vectors.col(static_cast<Eigen::Index>(candidate));
  double z = config.cl1 * coverage_gain(models.coverage, xi, remaining);
  if (state.step() > 0) {
    const SentenceVector prev = vectors.col(static_cast<Eigen::Index>(state.selected.back()));
    z += config.cl2 * coherence_score(models.coherence, prev, xi);
  }
  return z;
}

double selection_logit(const PairTables& tables, const ControlConfig& config, std::size_t candidate,
                       const SummaryState& state) {
  const auto n = static_cast<std::size_t>(tables.size());
  check_candidate(candidate, n, state);

  const auto i = static_cast<Eigen::Index>(candidate);
  double sum = 0.0;
  std::size_t count = 0;
  for (auto j : remaining_indices(n, state)) {
    if (j == candidate) continue;
    sum += tables.coverage(i, static_cast<Eigen::Index>(j));
    ++count;
  }
  double z = count > 0 ? config.cl1 * sum / static_cast<double>(count) : 0.0;
  if (state.step() > 0) {
    z += config.cl2 * tables.coherence(static_cast<Eigen::Index>(state.selected.back()), i);
  }
  return z;
}

double ActionDistribution::prob_of(std::size_t index) const {
  auto it = std::find(candidates.begin(), candidates.end(), index);
  if (it == candidates.end()) return 0.0;
  return probs[it - candidates.begin()];
}

ActionDistribution action_distribution(const PolicyModels& models, const ControlConfig& config,
                                       const SummaryState& state, const Eigen::MatrixXd& vectors) {
  auto candidates = remaining_indices(static_cast<std::size_t>(vectors.cols()), state);
  if (candidates.empty()) throw std::invalid_argument("action_distribution: no remaining candidates");
  Eigen::VectorXd logits(static_cast<Eigen::Index>(candidates.size()));
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    logits[static_cast<Eigen::Index>(c)] = selection_logit(models, config, candidates[c], state, vectors);
  }
  return softmax_over(std::move(candidates), std::move(logits));
}

ActionDistribution action_distribution(const PairTables& tables, const ControlConfig& config,
                                       const SummaryState& state) {
  auto candidates = remaining_indices(static_cast<std::size_t>(tables.size()), state);
  if (candidates.empty()) throw std::invalid_argument("action_distribution: no remaining candidates");
  Eigen::VectorXd logits(static_cast<Eigen::Index>(candidates.size()));
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    logits[static_cast<Eigen::Index>(c)] = selection_logit(tables, config, candidates[c], state);
  }
  return softmax_over(std::move(candidates), std::move(logits));
}

double pairwise_similarity_variance(const Eigen::MatrixXd& vectors) {
  const auto n = vectors.cols();
  if (n < 2) return 0.0;
  std::vector<double> sims;
  sims.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) sims.push_back(cosine(vectors.col(i), vectors.col(j)));
  }
  const Eigen::Map<const Eigen::ArrayXd> s(sims.data(), static_cast<Eigen::Index>(sims.size()));
  return (s - s.mean()).square().mean();
}

int num_sentences(const Eigen::MatrixXd& vectors, double k, double c, int max_tn) {
  if (vectors.cols() < 2) return 1;
  const double raw = std::floor(k + c * pairwise_similarity_variance(vectors) + kFloorSlack);
  const double upper = static_cast<double>(std::max(1, max_tn));
  return static_cast<int>(std::clamp(raw, 1.0, upper));
}

Trajectory extract_trajectory(const PolicyModels& models, const ControlConfig& config,
                              const Eigen::MatrixXd& vectors, std::string cluster_id, ExtractionMode mode,
                              std::uint64_t seed) {
  return extract_trajectory(PairTables::compute(models, vectors), config, vectors, std::move(cluster_id), mode,
                            seed);
}

Trajectory extract_trajectory(const PairTables& tables, const ControlConfig& config,
                              const Eigen::MatrixXd& vectors, std::string cluster_id, ExtractionMode mode,
                              std::uint64_t seed) {
  Trajectory traj;
  traj.cluster_id = std::move(cluster_id);
  const auto n = static_cast<int>(vectors.cols());
  if (n == 0) return traj;
  traj.tn = std::min(num_sentences(vectors, config.k, config.c, config.max_tn), n);

  Rng rng(seed);
  SummaryState state;
  for (int t = 0; t < traj.tn; ++t) {
    const auto dist = action_distribution(tables, config, state);
    Eigen::Index pick = 0;
    if (mode == ExtractionMode::greedy) {
      // maxCoeff returns the first maximum: lowest sentence index wins ties
      dist.logits.maxCoeff(&pick);
    } else {
      const double u = rng.uniform01();
      double cumulative = 0.0;
      pick = dist.probs.size() - 1;
      for (Eigen::Index c = 0; c < dist.probs.size(); ++c) {
        cumulative += dist.probs[c];
        if (u < cumulative) {
          pick = c;
          break;
        }
      }
    }
    const auto index = dist.candidates[static_cast<std::size_t>(pick)];
    traj.steps.push_back({index, dist.probs[pick], std::nullopt});
    state.selected.push_back(index);
  }
  return traj;
}

void write_trajectory_jsonl(std::ostream& out, const Trajectory& trajectory) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : trajectory.steps) steps.push_back({{"index", s.index}, {"prob", s.prob}});
  nlohmann::json row{{"cluster_id", trajectory.cluster_id}, {"steps", steps}, {"tn", trajectory.tn}};
  out << row.dump() << '\n';
}

}  // namespace exrw
