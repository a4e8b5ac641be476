#pragma once

// Independent reference computations. Nothing here calls the code it is
// used to check.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

namespace exrw::testing {

/// Clipped n-gram overlap by linear scans over explicit n-gram lists.
struct CountOracle {
  double overlap = 0;
  double candidate_total = 0;
  double reference_total = 0;
};

inline CountOracle brute_ngram_counts(const std::vector<std::string>& cand, const std::vector<std::string>& ref,
                                      int n) {
  auto grams = [n](const std::vector<std::string>& t) {
    std::vector<std::vector<std::string>> out;
    for (int i = 0; i + n <= static_cast<int>(t.size()); ++i) out.emplace_back(t.begin() + i, t.begin() + i + n);
    return out;
  };
  const auto cg = grams(cand);
  const auto rg = grams(ref);
  CountOracle o;
  o.candidate_total = static_cast<double>(cg.size());
  o.reference_total = static_cast<double>(rg.size());
  std::vector<std::vector<std::string>> done;
  for (const auto& g : cg) {
    if (std::find(done.begin(), done.end(), g) != done.end()) continue;
    done.push_back(g);
    const auto in_c = std::count(cg.begin(), cg.end(), g);
    const auto in_r = std::count(rg.begin(), rg.end(), g);
    o.overlap += static_cast<double>(std::min(in_c, in_r));
  }
  return o;
}

inline bool is_subsequence(const std::vector<std::string>& sub, const std::vector<std::string>& seq) {
  std::size_t j = 0;
  for (const auto& tok : seq) {
    if (j < sub.size() && sub[j] == tok) ++j;
  }
  return j == sub.size();
}

/// Longest common subsequence by enumerating every subsequence of `a`.
inline int brute_lcs(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  int best = 0;
  const auto m = a.size();
  for (std::size_t mask = 0; mask < (std::size_t{1} << m); ++mask) {
    std::vector<std::string> sub;
    for (std::size_t i = 0; i < m; ++i) {
      if (mask & (std::size_t{1} << i)) sub.push_back(a[i]);
    }
    if (static_cast<int>(sub.size()) > best && is_subsequence(sub, b)) best = static_cast<int>(sub.size());
  }
  return best;
}

inline double f1_of(double overlap, double cand_total, double ref_total) {
  const double p = cand_total > 0 ? overlap / cand_total : 0.0;
  const double r = ref_total > 0 ? overlap / ref_total : 0.0;
  return p + r > 0 ? 2 * p * r / (p + r) : 0.0;
}

/// Central differences of `f` with respect to every coordinate of `x`.
inline Eigen::VectorXd central_difference(const std::function<double(const Eigen::VectorXd&)>& f,
                                          const Eigen::VectorXd& x, double step = 1e-5) {
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + step;
    const double up = f(probe);
    probe[i] = x[i] - step;
    const double down = f(probe);
    probe[i] = x[i];
    g[i] = (up - down) / (2 * step);
  }
  return g;
}

/// ||a - b|| / max(||a||, ||b||); 0 when both are (numerically) zero.
inline double relative_error(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double scale = std::max(a.norm(), b.norm());
  if (scale < 1e-12) return 0.0;
  return (a - b).norm() / scale;
}

/// Sentence budget by explicit pairwise enumeration: the variance is taken
/// as E[s^2] - E[s]^2 over every i < j cosine.
inline int brute_num_sentences(const std::vector<Eigen::VectorXd>& vs, double k, double c, int max_tn) {
  if (vs.size() < 2) return 1;
  double sum = 0;
  double sq = 0;
  double count = 0;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    for (std::size_t j = i + 1; j < vs.size(); ++j) {
      const double s = vs[i].dot(vs[j]) / (vs[i].norm() * vs[j].norm());
      sum += s;
      sq += s * s;
      count += 1;
    }
  }
  const double var = sq / count - (sum / count) * (sum / count);
  const int tn = static_cast<int>(std::floor(k + c * var + 1e-9));
  return std::clamp(tn, 1, max_tn);
}

}  // namespace exrw::testing
