#pragma once

#include <Eigen/Dense>

#include <span>

#include "exrw/embedding.hpp"
#include "exrw/neural.hpp"

namespace exrw {

/// Bidirectional pairwise coverage scorer: a forward model reads (xi, xj)
/// and a backward model reads (xj, xi); the score is their mean.
struct CoverageModel {
  Mlp forward;
  Mlp backward;

  static CoverageModel zeros(int dim);
  static CoverageModel random(int dim, Rng& rng);

  bool operator==(const CoverageModel&) const = default;
};

double pair_coverage(const CoverageModel& m, const SentenceVector& xi, const SentenceVector& xj);

/// Mean pair_coverage of `xi` against every vector in `remaining`; 0 when
/// `remaining` is empty. The caller excludes `xi` itself.
double coverage_gain(const CoverageModel& m, const SentenceVector& xi,
                     std::span<const SentenceVector> remaining);

/// N x N table with entry (i, j) = pair_coverage(col i, col j).
Eigen::MatrixXd coverage_table(const CoverageModel& m, const Eigen::MatrixXd& vectors);

}  // namespace exrw
