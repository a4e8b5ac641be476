#include "exrw/coverage.hpp"

namespace exrw {

CoverageModel CoverageModel::zeros(int dim) { return {Mlp::zeros(5 * dim), Mlp::zeros(5 * dim)}; }

CoverageModel CoverageModel::random(int dim, Rng& rng) {
  auto fwd = Mlp::random(5 * dim, rng);
  auto bwd = Mlp::random(5 * dim, rng);
  return {std::move(fwd), std::move(bwd)};
}

double pair_coverage(const CoverageModel& m, const SentenceVector& xi, const SentenceVector& xj) {
  return 0.5 * (mlp_forward(m.forward, pair_features(xi, xj)) + mlp_forward(m.backward, pair_features(xj, xi)));
}

double coverage_gain(const CoverageModel& m, const SentenceVector& xi,
                     std::span<const SentenceVector> remaining) {
  if (remaining.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& xj : remaining) sum += pair_coverage(m, xi, xj);
  return sum / static_cast<double>(remaining.size());
}

Eigen::MatrixXd coverage_table(const CoverageModel& m, const Eigen::MatrixXd& vectors) {
  const auto n = vectors.cols();
  Eigen::MatrixXd table(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      table(i, j) = 0.5 * (mlp_forward(m.forward, pair_features(vectors.col(i), vectors.col(j))) +
                           mlp_forward(m.backward, pair_features(vectors.col(j), vectors.col(i))));
    }
  }
  return table;
}

}  // namespace exrw
