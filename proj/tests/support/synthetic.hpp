#pragma once

// Synthetic embeddings with planted structure, shared by the unit and
// acceptance suites.

#include <Eigen/Dense>

#include <cmath>
#include <vector>

#include "exrw/coherence.hpp"
#include "exrw/rng.hpp"

namespace exrw::testing {

inline Eigen::VectorXd random_unit(int dim, Rng& rng) {
  Eigen::VectorXd v(dim);
  for (int i = 0; i < dim; ++i) v[i] = rng.normal();
  return v.normalized();
}

/// Unit vector at exactly cosine `cos` from unit vector `anchor`.
inline Eigen::VectorXd with_cosine(const Eigen::VectorXd& anchor, double cos, Rng& rng) {
  Eigen::VectorXd u = random_unit(static_cast<int>(anchor.size()), rng);
  u -= u.dot(anchor) * anchor;
  u.normalize();
  return cos * anchor + std::sqrt(1.0 - cos * cos) * u;
}

struct Bands {
  double coherent_lo = 0.70;
  double coherent_hi = 0.80;
  double incoherent_lo = -0.80;
  double incoherent_hi = -0.60;
};

/// Three planted cosine bands: coherent positives, incoherent random-source
/// negatives and self-pair negatives at cosine 1. Two triplets per positive.
inline std::vector<Triplet> planted_triplets(std::size_t positives, int dim, Rng& rng, Bands b = {}) {
  std::vector<Triplet> out;
  for (std::size_t i = 0; i < positives; ++i) {
    const auto anchor = random_unit(dim, rng);
    const auto positive = with_cosine(anchor, rng.uniform(b.coherent_lo, b.coherent_hi), rng);
    const auto negative = with_cosine(anchor, rng.uniform(b.incoherent_lo, b.incoherent_hi), rng);
    out.push_back({anchor, positive, negative, NegativeKind::random_source, {}, {}, {}});
    out.push_back({anchor, positive, anchor, NegativeKind::self_pair, {}, {}, {}});
  }
  return out;
}

/// A cluster of `chain_len` sentences linked by coherent-band steps plus
/// `noise` unrelated sentences, shuffled into the columns.
inline Eigen::MatrixXd chain_cluster(int chain_len, int noise, int dim, Rng& rng) {
  std::vector<Eigen::VectorXd> vs;
  vs.push_back(random_unit(dim, rng));
  for (int i = 1; i < chain_len; ++i) vs.push_back(with_cosine(vs.back(), rng.uniform(0.70, 0.80), rng));
  for (int i = 0; i < noise; ++i) vs.push_back(random_unit(dim, rng));
  rng.shuffle(vs);
  Eigen::MatrixXd m(dim, static_cast<Eigen::Index>(vs.size()));
  for (std::size_t i = 0; i < vs.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = vs[i];
  return m;
}

inline Eigen::MatrixXd random_cluster(int n, int dim, Rng& rng) {
  Eigen::MatrixXd m(dim, n);
  for (int i = 0; i < n; ++i) m.col(i) = random_unit(dim, rng);
  return m;
}

}  // namespace exrw::testing
