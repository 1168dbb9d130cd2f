#include "avgtd/environments.hpp"

#include <cmath>

#include "avgtd/errors.hpp"
#include "avgtd/mdp_io.hpp"
#include "avgtd/sampling.hpp"

namespace avgtd {

namespace {

PolicyMarkovChain random_walk(int n) {
  if (n < 1) throw ParameterError("random_walk: n must be positive");
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
  for (int s = 0; s < n; ++s) {
    int left = s > 0 ? s - 1 : s;       // reflect = stay at the boundary
    int right = s < n - 1 ? s + 1 : s;
    P(s, left) += 0.5;
    P(s, right) += 0.5;
  }
  Eigen::VectorXd R = Eigen::VectorXd::Zero(n);
  R(n - 1) = 1.0;
  return make_chain(std::move(P), std::move(R));
}

PolicyMarkovChain gridworld(int w, int h) {
  if (w < 1 || h < 1) throw ParameterError("gridworld: dimensions must be positive");
  const int n = w * h;
  auto idx = [w](int x, int y) { return y * w + x; };
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
  const int dx[4] = {1, -1, 0, 0};
  const int dy[4] = {0, 0, 1, -1};
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int m = 0; m < 4; ++m) {
        int nx = x + dx[m], ny = y + dy[m];
        if (nx < 0 || nx >= w || ny < 0 || ny >= h) { nx = x; ny = y; }
        P(idx(x, y), idx(nx, ny)) += 0.25;
      }
  Eigen::VectorXd R = Eigen::VectorXd::Zero(n);
  R(idx(w - 1, h - 1)) = 1.0;
  return make_chain(std::move(P), std::move(R));
}

PolicyMarkovChain random_mdp(int n, double sparsity, uint64_t seed) {
  if (n < 1) throw ParameterError("random_mdp: n must be positive");
  if (!(sparsity >= 0.0 && sparsity < 1.0))
    throw ParameterError("random_mdp: sparsity must lie in [0,1)");
  SplitMix64 rng(mix64(seed + 0x9E3779B97F4A7C15ULL));
  Eigen::MatrixXd P(n, n);
  for (int i = 0; i < n; ++i) {
    // Dirichlet(1) row = normalized unit exponentials, with independent
    // drop-outs at the sparsity rate.
    for (int j = 0; j < n; ++j) P(i, j) = -std::log(rng.uniform01());
    if (sparsity > 0.0)
      for (int j = 0; j < n; ++j)
        if (rng.uniform01() <= sparsity) P(i, j) = 0.0;
    double sum = P.row(i).sum();
    if (sum == 0.0) {
      int keep = static_cast<int>(rng.next() % static_cast<uint64_t>(n));
      P(i, keep) = 1.0;
      sum = 1.0;
    }
    P.row(i) /= sum;
    // Exact unit row sum: fold the rounding residue into the largest entry.
    int jmax;
    P.row(i).maxCoeff(&jmax);
    P(i, jmax) += 1.0 - P.row(i).sum();
  }
  Eigen::VectorXd R(n);
  for (int i = 0; i < n; ++i) R(i) = rng.uniform01();
  return make_chain(std::move(P), std::move(R));
}

}  // namespace

PolicyMarkovChain generate_environment(const EnvironmentSpec& spec) {
  switch (spec.kind) {
    case EnvironmentSpec::Kind::random_walk:
      return random_walk(spec.n);
    case EnvironmentSpec::Kind::gridworld:
      return gridworld(spec.width, spec.height);
    case EnvironmentSpec::Kind::random_mdp:
      return random_mdp(spec.n, spec.sparsity, spec.seed);
    case EnvironmentSpec::Kind::file:
      return load_chain_json(spec.path);
  }
  throw ParameterError("generate_environment: unknown environment kind");
}

}  // namespace avgtd
