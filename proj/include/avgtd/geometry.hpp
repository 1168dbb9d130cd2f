#pragma once
#include <Eigen/Dense>
#include <utility>

#include "avgtd/markov_chain.hpp"

namespace avgtd {

// Linear value features: row s of phi is phi(s)^T. Rows are normalized so
// that max_s ||phi(s)||_2 <= 1 and columns are linearly independent.
struct FeatureMap {
  Eigen::MatrixXd phi;  // n x d
  int d = 0;
};

// Validates row norms (<= 1 + 1e-12) and numerical column rank d.
FeatureMap make_feature_map(Eigen::MatrixXd phi);

// Identity features (one indicator per state).
FeatureMap tabular_features(int n);

// sqrt(sum_s mu(s) f(s)^2)
double d_norm(const Eigen::VectorXd& f, const Eigen::VectorXd& mu);

// sqrt(0.5 sum_{s,s'} mu(s) P(s,s') (f(s) - f(s'))^2); agrees with the
// quadratic form f^T D (I - P) f.
double dirichlet_seminorm(const Eigen::VectorXd& f,
                          const PolicyMarkovChain& chain,
                          const Eigen::VectorXd& mu);

// Pi = I - e mu^T (annihilates constants, fixes mu-centered vectors).
Eigen::MatrixXd pi_projection(int n, const Eigen::VectorXd& mu);

// Smallest value over unit x of ||Phi x||_Dir^2 + (mu^T Phi x)^2, i.e.
// lambda_min of sym(Phi^T D (I-P) Phi) + (Phi^T mu)(Phi^T mu)^T.
double eta1(const FeatureMap& features, const PolicyMarkovChain& chain,
            const Eigen::VectorXd& mu);

// Smallest value of ||Phi x||_Dir^2 over unit x with x^T 1_d = 0 (d >= 2).
double eta2(const FeatureMap& features, const PolicyMarkovChain& chain,
            const Eigen::VectorXd& mu);

// lambda_min(Phi^T D Phi) times the smallest generalized eigenvalue of
// (sym(D(I-P)), D) restricted to the D-orthogonal complement of constants.
double eta3(const FeatureMap& features, const PolicyMarkovChain& chain,
            const Eigen::VectorXd& mu);

// lambda_min(Phi^T D Phi)
double eta_prime(const FeatureMap& features, const Eigen::VectorXd& mu);

// omega = sqrt(max z^T P^T D P z) over mu-centered z with ||z||_D = 1;
// strictly below 1 for ergodic chains.
double contraction_factor(const PolicyMarkovChain& chain,
                          const Eigen::VectorXd& mu);

struct SpectralReport {
  double eta1 = 0;
  double eta2 = 0;  // NaN when d < 2 (constraint set empty)
  double eta3 = 0;
  double eta_prime = 0;
  double omega = 0;
};

SpectralReport spectral_report(const FeatureMap& features,
                               const PolicyMarkovChain& chain,
                               const Eigen::VectorXd& mu);

// (R_w, R_theta): R_w = 1 and
// R_theta = 2 r_max C / ((1 - beta) sqrt((1 - omega^2) lambda_min(Phi^T D Phi))),
// the radii that keep both exact fixed points feasible under projection.
std::pair<double, double> projection_radii(const PolicyMarkovChain& chain,
                                           const Eigen::VectorXd& mu,
                                           const FeatureMap& features,
                                           double mix_C, double mix_beta,
                                           double omega);

}  // namespace avgtd
