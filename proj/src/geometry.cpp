#include "avgtd/geometry.hpp"

#include <cmath>
#include <limits>

#include "avgtd/errors.hpp"

namespace avgtd {

namespace {

Eigen::MatrixXd sym(const Eigen::MatrixXd& M) {
  return 0.5 * (M + M.transpose());
}

int numerical_rank(const Eigen::MatrixXd& M) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return 0;
  const double tol = 1e-10 * sv(0);
  int r = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > tol) ++r;
  return r;
}

void require_full_rank(const FeatureMap& features) {
  if (numerical_rank(features.phi) != features.d)
    throw StructuralError("feature matrix is rank-deficient");
}

// Orthonormal basis of the hyperplane {x : v^T x = 0} (n x (n-1)).
Eigen::MatrixXd complement_basis(const Eigen::VectorXd& v) {
  const int n = static_cast<int>(v.size());
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(v);
  Eigen::MatrixXd Q = qr.householderQ();
  return Q.rightCols(n - 1);
}

// Basis B of {z : mu^T z = 0} with B^T D B = I (D = diag(mu)), so Euclidean
// eigenproblems on B-coordinates are the D-restricted generalized ones.
Eigen::MatrixXd d_orthonormal_centered_basis(const Eigen::VectorXd& mu) {
  Eigen::MatrixXd B0 = complement_basis(mu);
  Eigen::MatrixXd G = B0.transpose() * mu.asDiagonal() * B0;
  Eigen::LLT<Eigen::MatrixXd> llt(G);
  if (llt.info() != Eigen::Success)
    throw StructuralError("degenerate stationary weights");
  return llt.matrixL().solve(B0.transpose()).transpose();
}

double lambda_min(const Eigen::MatrixXd& S) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double lambda_max(const Eigen::MatrixXd& S) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

Eigen::MatrixXd dirichlet_form(const FeatureMap& features,
                               const PolicyMarkovChain& chain,
                               const Eigen::VectorXd& mu) {
  const Eigen::MatrixXd& Phi = features.phi;
  Eigen::MatrixXd DIP = mu.asDiagonal() *
                        (Eigen::MatrixXd::Identity(chain.n, chain.n) - chain.P);
  return sym(Phi.transpose() * DIP * Phi);
}

}  // namespace

FeatureMap make_feature_map(Eigen::MatrixXd phi) {
  const int n = static_cast<int>(phi.rows());
  const int d = static_cast<int>(phi.cols());
  if (n < 1 || d < 1) throw ParameterError("make_feature_map: empty matrix");
  if (d > n) throw ParameterError("make_feature_map: d must not exceed n");
  for (int s = 0; s < n; ++s)
    if (phi.row(s).norm() > 1.0 + 1e-12)
      throw ParameterError("make_feature_map: feature row norm exceeds 1");
  FeatureMap f;
  f.phi = std::move(phi);
  f.d = d;
  require_full_rank(f);
  return f;
}

FeatureMap tabular_features(int n) {
  if (n < 1) throw ParameterError("tabular_features: n must be positive");
  FeatureMap f;
  f.phi = Eigen::MatrixXd::Identity(n, n);
  f.d = n;
  return f;
}

double d_norm(const Eigen::VectorXd& f, const Eigen::VectorXd& mu) {
  if (f.size() != mu.size()) throw ParameterError("d_norm: length mismatch");
  return std::sqrt(mu.dot(f.cwiseProduct(f)));
}

double dirichlet_seminorm(const Eigen::VectorXd& f,
                          const PolicyMarkovChain& chain,
                          const Eigen::VectorXd& mu) {
  const int n = chain.n;
  if (f.size() != n || mu.size() != n)
    throw ParameterError("dirichlet_seminorm: length mismatch");
  double acc = 0.0;
  for (int s = 0; s < n; ++s)
    for (int t = 0; t < n; ++t) {
      double diff = f(s) - f(t);
      acc += mu(s) * chain.P(s, t) * diff * diff;
    }
  return std::sqrt(0.5 * acc);
}

Eigen::MatrixXd pi_projection(int n, const Eigen::VectorXd& mu) {
  if (mu.size() != n) throw ParameterError("pi_projection: length mismatch");
  return Eigen::MatrixXd::Identity(n, n) -
         Eigen::VectorXd::Ones(n) * mu.transpose();
}

double eta1(const FeatureMap& features, const PolicyMarkovChain& chain,
            const Eigen::VectorXd& mu) {
  require_full_rank(features);
  Eigen::VectorXd pm = features.phi.transpose() * mu;
  return lambda_min(dirichlet_form(features, chain, mu) + pm * pm.transpose());
}

double eta2(const FeatureMap& features, const PolicyMarkovChain& chain,
            const Eigen::VectorXd& mu) {
  if (features.d < 2)
    throw ParameterError("eta2: needs d >= 2 (constraint set is empty)");
  Eigen::MatrixXd B = complement_basis(Eigen::VectorXd::Ones(features.d));
  Eigen::MatrixXd S = B.transpose() * dirichlet_form(features, chain, mu) * B;
  return std::max(0.0, lambda_min(S));
}

double eta3(const FeatureMap& features, const PolicyMarkovChain& chain,
            const Eigen::VectorXd& mu) {
  require_full_rank(features);
  if (chain.n == 1) return 0.0;  // no centered directions to restrict to
  Eigen::MatrixXd B = d_orthonormal_centered_basis(mu);
  Eigen::MatrixXd DIP = mu.asDiagonal() *
                        (Eigen::MatrixXd::Identity(chain.n, chain.n) - chain.P);
  double restricted = std::max(0.0, lambda_min(B.transpose() * sym(DIP) * B));
  return eta_prime(features, mu) * restricted;
}

double eta_prime(const FeatureMap& features, const Eigen::VectorXd& mu) {
  Eigen::MatrixXd S =
      features.phi.transpose() * mu.asDiagonal() * features.phi;
  return lambda_min(sym(S));
}

double contraction_factor(const PolicyMarkovChain& chain,
                          const Eigen::VectorXd& mu) {
  if (chain.n == 1) return 0.0;  // centered subspace is trivial
  Eigen::MatrixXd B = d_orthonormal_centered_basis(mu);
  Eigen::MatrixXd PDP =
      chain.P.transpose() * mu.asDiagonal() * chain.P;
  double omega_sq = std::max(0.0, lambda_max(B.transpose() * sym(PDP) * B));
  double omega = std::sqrt(omega_sq);
  if (omega >= 1.0)
    throw StructuralError("contraction_factor: omega >= 1 (chain not ergodic)");
  return omega;
}

SpectralReport spectral_report(const FeatureMap& features,
                               const PolicyMarkovChain& chain,
                               const Eigen::VectorXd& mu) {
  SpectralReport r;
  r.eta1 = eta1(features, chain, mu);
  r.eta2 = features.d >= 2 ? eta2(features, chain, mu)
                           : std::numeric_limits<double>::quiet_NaN();
  r.eta3 = eta3(features, chain, mu);
  r.eta_prime = eta_prime(features, mu);
  r.omega = contraction_factor(chain, mu);
  return r;
}

std::pair<double, double> projection_radii(const PolicyMarkovChain& chain,
                                           const Eigen::VectorXd& mu,
                                           const FeatureMap& features,
                                           double mix_C, double mix_beta,
                                           double omega) {
  if (!(mix_C > 0.0) || !(mix_beta >= 0.0 && mix_beta < 1.0))
    throw ParameterError("projection_radii: need C > 0 and beta in [0,1)");
  if (omega >= 1.0)
    throw StructuralError("projection_radii: omega >= 1");
  const double ep = eta_prime(features, mu);
  if (ep <= 1e-14)
    throw StructuralError("projection_radii: Phi^T D Phi is singular");
  const double r_theta =
      2.0 * chain.r_max * mix_C /
      ((1.0 - mix_beta) * std::sqrt((1.0 - omega * omega) * ep));
  return {1.0, r_theta};
}

}  // namespace avgtd
