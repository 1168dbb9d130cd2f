#include "avgtd/features.hpp"

#include "avgtd/errors.hpp"
#include "avgtd/sampling.hpp"

namespace avgtd {

namespace {

int numerical_rank(const Eigen::MatrixXd& M) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
  const auto& sv = svd.singularValues();
  const double tol = 1e-10 * sv(0);
  int r = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > tol) ++r;
  return r;
}

}  // namespace

FeatureMap generate_features(const PolicyMarkovChain& chain,
                             const StationaryAnalysis& analysis, int d,
                             double bernoulli_p, uint64_t seed,
                             bool include_e_and_wstar) {
  const int n = chain.n;
  const int reserved = include_e_and_wstar ? 2 : 0;
  if (d > n) throw ParameterError("generate_features: d must not exceed n");
  if (d < reserved + 1)
    throw ParameterError("generate_features: d too small for the requested columns");
  if (!(bernoulli_p > 0.0 && bernoulli_p < 1.0))
    throw ParameterError("generate_features: bernoulli_p must lie in (0,1)");

  SplitMix64 rng(mix64(seed + 0x6A09E667F3BCC909ULL));
  for (int attempt = 0; attempt < 100; ++attempt) {
    Eigen::MatrixXd phi(n, d);
    for (int s = 0; s < n; ++s)
      for (int j = 0; j < d - reserved; ++j)
        phi(s, j) = rng.uniform01() <= bernoulli_p ? 1.0 : 0.0;
    if (include_e_and_wstar) {
      phi.col(d - 2) = Eigen::VectorXd::Ones(n);
      phi.col(d - 1) = analysis.w_star;
    }
    if (numerical_rank(phi) != d) continue;
    double scale = 0.0;
    for (int s = 0; s < n; ++s) scale = std::max(scale, phi.row(s).norm());
    phi /= scale;
    return make_feature_map(std::move(phi));
  }
  throw StructuralError(
      "generate_features: full column rank not reached in 100 attempts");
}

}  // namespace avgtd
