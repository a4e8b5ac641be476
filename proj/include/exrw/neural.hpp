#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "exrw/rng.hpp"

namespace exrw {

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Parameters of a one-layer sigmoid scorer: sigmoid(w . f + b).
template <typename Scalar>
struct MlpParams {
  VectorX<Scalar> weights;
  Scalar bias = Scalar(0);

  Eigen::Index in_dim() const { return weights.size(); }

  static MlpParams zeros(Eigen::Index in_dim) { return {VectorX<Scalar>::Zero(in_dim), Scalar(0)}; }

  /// weights ~ U(-1/sqrt(in_dim), 1/sqrt(in_dim)), bias 0.
  static MlpParams random(Eigen::Index in_dim, Rng& rng) {
    MlpParams p = zeros(in_dim);
    const double bound = 1.0 / std::sqrt(static_cast<double>(in_dim));
    for (Eigen::Index i = 0; i < in_dim; ++i) p.weights[i] = Scalar(rng.uniform(-bound, bound));
    return p;
  }

  bool operator==(const MlpParams&) const = default;
};

template <typename Scalar>
struct GradRecord {
  VectorX<Scalar> d_weights;
  Scalar d_bias = Scalar(0);

  static GradRecord zeros(Eigen::Index in_dim) { return {VectorX<Scalar>::Zero(in_dim), Scalar(0)}; }

  GradRecord& operator+=(const GradRecord& other) {
    d_weights += other.d_weights;
    d_bias += other.d_bias;
    return *this;
  }
};

using Mlp = MlpParams<double>;
using MlpGrad = GradRecord<double>;

/// Plain gradient-descent step.
template <typename Scalar>
void apply_gradient(MlpParams<Scalar>& p, const GradRecord<Scalar>& g, Scalar learning_rate) {
  p.weights.noalias() -= learning_rate * g.d_weights;
  p.bias -= learning_rate * g.d_bias;
}

/// [x1; x2; x1 .* x2; x1 - x2; |x1 - x2|], length 5d.
template <typename DerivedA, typename DerivedB>
VectorX<typename DerivedA::Scalar> pair_features(const Eigen::MatrixBase<DerivedA>& x1,
                                                 const Eigen::MatrixBase<DerivedB>& x2) {
  if (x1.size() != x2.size()) {
    throw ShapeError("pair_features: dims " + std::to_string(x1.size()) + " and " +
                     std::to_string(x2.size()) + " differ");
  }
  const Eigen::Index d = x1.size();
  VectorX<typename DerivedA::Scalar> f(5 * d);
  f.segment(0, d) = x1;
  f.segment(d, d) = x2;
  f.segment(2 * d, d) = x1.cwiseProduct(x2);
  f.segment(3 * d, d) = x1 - x2;
  f.segment(4 * d, d) = (x1 - x2).cwiseAbs();
  return f;
}

// Pre-activations are clamped so the output stays strictly inside (0, 1)
// in double precision.
template <typename Scalar>
Scalar sigmoid(Scalar z) {
  constexpr Scalar kLimit = Scalar(35);
  z = std::clamp(z, -kLimit, kLimit);
  if (z >= Scalar(0)) return Scalar(1) / (Scalar(1) + std::exp(-z));
  const Scalar e = std::exp(z);
  return e / (Scalar(1) + e);
}

template <typename Scalar, typename Derived>
Scalar mlp_forward(const MlpParams<Scalar>& p, const Eigen::MatrixBase<Derived>& f) {
  if (f.size() != p.in_dim()) {
    throw ShapeError("mlp_forward: expected " + std::to_string(p.in_dim()) + " features, got " +
                     std::to_string(f.size()));
  }
  return sigmoid<Scalar>(p.weights.dot(f) + p.bias);
}

/// Gradient of upstream * mlp_forward(p, f) with respect to p.
template <typename Scalar, typename Derived>
GradRecord<Scalar> mlp_backward(const MlpParams<Scalar>& p, const Eigen::MatrixBase<Derived>& f,
                                Scalar upstream) {
  const Scalar s = mlp_forward(p, f);
  const Scalar local = upstream * s * (Scalar(1) - s);
  return {local * f, local};
}

/// Accumulating variant of mlp_backward that avoids a temporary record.
template <typename Scalar, typename Derived>
void mlp_backward_into(const MlpParams<Scalar>& p, const Eigen::MatrixBase<Derived>& f, Scalar upstream,
                       GradRecord<Scalar>& into) {
  if (upstream == Scalar(0)) return;
  const Scalar s = mlp_forward(p, f);
  const Scalar local = upstream * s * (Scalar(1) - s);
  into.d_weights.noalias() += local * f;
  into.d_bias += local;
}

}  // namespace exrw
