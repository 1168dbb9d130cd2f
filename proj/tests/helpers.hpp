#pragma once
// Shared fixtures for the test binaries: deterministic random instances
// built on the library's own seeded generator so expected values are stable.

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "avgtd/geometry.hpp"
#include "avgtd/markov_chain.hpp"
#include "avgtd/sampling.hpp"

namespace testutil {

using avgtd::SplitMix64;

// Dense strictly positive rows (symmetric Dirichlet(1)), rewards in [-1, 1].
inline avgtd::PolicyMarkovChain random_ergodic_chain(SplitMix64& rng, int n) {
  Eigen::MatrixXd P(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) P(i, j) = -std::log(rng.uniform01());
    P.row(i) /= P.row(i).sum();
    int jmax;
    P.row(i).maxCoeff(&jmax);
    P(i, jmax) += 1.0 - P.row(i).sum();  // exact unit row sum
  }
  Eigen::VectorXd R(n);
  for (int i = 0; i < n; ++i) R(i) = 2.0 * rng.uniform01() - 1.0;
  return avgtd::make_chain(std::move(P), std::move(R));
}

// Full-rank n x d matrix with uniform entries, rows scaled so the largest
// has unit norm.
inline avgtd::FeatureMap random_features(SplitMix64& rng, int n, int d) {
  for (int attempt = 0; attempt < 200; ++attempt) {
    Eigen::MatrixXd phi(n, d);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < d; ++j) phi(i, j) = 2.0 * rng.uniform01() - 1.0;
    double scale = 0.0;
    for (int i = 0; i < n; ++i) scale = std::max(scale, phi.row(i).norm());
    if (scale == 0.0) continue;
    phi /= scale;
    try {
      return avgtd::make_feature_map(std::move(phi));
    } catch (const std::exception&) {
      continue;  // rank-deficient draw; retry
    }
  }
  throw std::runtime_error("random_features: no full-rank draw");
}

// Standard normal via Box-Muller on the deterministic stream.
inline double normal_draw(SplitMix64& rng) {
  double u1 = rng.uniform01();
  double u2 = rng.uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

inline Eigen::VectorXd random_unit(SplitMix64& rng, int d) {
  Eigen::VectorXd v(d);
  do {
    for (int i = 0; i < d; ++i) v(i) = normal_draw(rng);
  } while (v.norm() == 0.0);
  return v / v.norm();
}

// 10,000-step power iteration, the cross-check oracle for the direct solve.
inline Eigen::VectorXd power_iteration_mu(const Eigen::MatrixXd& P,
                                          int iters = 10000) {
  const int n = static_cast<int>(P.rows());
  Eigen::VectorXd v = Eigen::VectorXd::Constant(n, 1.0 / n);
  for (int k = 0; k < iters; ++k) {
    v = P.transpose() * v;
    v /= v.sum();
  }
  return v;
}

inline double least_squares_slope(const std::vector<double>& xs,
                                  const std::vector<double>& ys) {
  const size_t m = xs.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < m; ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace testutil
