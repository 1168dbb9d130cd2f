#include "avgtd/markov_chain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <sstream>

#include "avgtd/errors.hpp"

namespace avgtd {

PolicyMarkovChain make_chain(Eigen::MatrixXd P, Eigen::VectorXd R) {
  const int n = static_cast<int>(P.rows());
  if (n < 1 || P.cols() != n)
    throw ParameterError("make_chain: P must be square and nonempty");
  if (R.size() != n)
    throw ParameterError("make_chain: R length must match P");
  for (int i = 0; i < n; ++i) {
    double row_sum = P.row(i).sum();
    if (std::abs(row_sum - 1.0) > 1e-12) {
      std::ostringstream os;
      os << "make_chain: row " << i << " sums to " << row_sum;
      throw ParameterError(os.str());
    }
    for (int j = 0; j < n; ++j)
      if (P(i, j) < 0.0 || P(i, j) > 1.0)
        throw ParameterError("make_chain: transition probability outside [0,1]");
  }
  if (!R.allFinite()) throw ParameterError("make_chain: non-finite reward");
  PolicyMarkovChain c;
  c.n = n;
  c.P = std::move(P);
  c.R = std::move(R);
  c.r_max = c.R.cwiseAbs().maxCoeff();
  return c;
}

bool ValidationReport::pass() const {
  return negative_entries == 0 && max_row_sum_deviation <= 1e-12 &&
         irreducible && aperiodic;
}

std::string ValidationReport::describe() const {
  std::ostringstream os;
  os << "row-sum deviation max " << max_row_sum_deviation
     << "; negative entries " << negative_entries << "; "
     << (irreducible ? "irreducible" : "reducible") << "; "
     << (aperiodic ? "aperiodic" : "periodic");
  if (period > 1) os << " (period " << period << ")";
  os << "; " << (pass() ? "PASS" : "FAIL");
  return os.str();
}

namespace {

// BFS over the positive-entry graph. Returns visit flags and BFS levels.
void bfs(const Eigen::MatrixXd& P, int start, bool forward,
         std::vector<int>& level) {
  const int n = static_cast<int>(P.rows());
  level.assign(n, -1);
  std::queue<int> q;
  level[start] = 0;
  q.push(start);
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (int v = 0; v < n; ++v) {
      double p = forward ? P(u, v) : P(v, u);
      if (p > 0.0 && level[v] < 0) {
        level[v] = level[u] + 1;
        q.push(v);
      }
    }
  }
}

}  // namespace

ValidationReport validate_chain(const PolicyMarkovChain& chain) {
  ValidationReport rep;
  const int n = chain.n;
  for (int i = 0; i < n; ++i) {
    rep.max_row_sum_deviation =
        std::max(rep.max_row_sum_deviation, std::abs(chain.P.row(i).sum() - 1.0));
    for (int j = 0; j < n; ++j)
      if (chain.P(i, j) < 0.0) ++rep.negative_entries;
  }

  std::vector<int> fwd, bwd;
  bfs(chain.P, 0, true, fwd);
  bfs(chain.P, 0, false, bwd);
  rep.irreducible = std::all_of(fwd.begin(), fwd.end(), [](int l) { return l >= 0; }) &&
                    std::all_of(bwd.begin(), bwd.end(), [](int l) { return l >= 0; });

  // Period = gcd over edges (u -> v), both reachable from 0, of
  // level(u) + 1 - level(v). Equals the chain period when irreducible.
  long g = 0;
  for (int u = 0; u < n; ++u) {
    if (fwd[u] < 0) continue;
    for (int v = 0; v < n; ++v) {
      if (chain.P(u, v) > 0.0 && fwd[v] >= 0)
        g = std::gcd(g, static_cast<long>(fwd[u]) + 1 - fwd[v]);
    }
  }
  rep.period = static_cast<int>(g);
  rep.aperiodic = (g == 1);
  return rep;
}

PolicyMarkovChain make_ergodic(const PolicyMarkovChain& chain, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw ParameterError("make_ergodic: epsilon must lie in (0,1)");
  Eigen::MatrixXd P = chain.P;
  const int n = chain.n;
  for (int i = 0; i < n; ++i) {
    int zeros = 0;
    for (int j = 0; j < n; ++j)
      if (P(i, j) == 0.0) ++zeros;
    if (zeros == 0) continue;
    const double fill = epsilon / zeros;
    for (int j = 0; j < n; ++j)
      P(i, j) = (P(i, j) == 0.0) ? fill : (1.0 - epsilon) * P(i, j);
  }
  return make_chain(std::move(P), chain.R);
}

Eigen::VectorXd stationary_distribution(const PolicyMarkovChain& chain) {
  const int n = chain.n;
  if (n == 1) return Eigen::VectorXd::Ones(1);

  // (I - P^T) mu = 0 has a one-dimensional kernel for irreducible chains and
  // its rows are linearly dependent (columns of I - P^T sum to zero), so
  // replacing one equation with the normalization sum(mu) = 1 is exact.
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n) - chain.P.transpose();
  A.row(n - 1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b(n - 1) = 1.0;

  Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  if (!lu.isInvertible())
    throw StructuralError("stationary_distribution: singular system (chain not ergodic)");
  Eigen::VectorXd mu = lu.solve(b);

  double residual = ((mu.transpose() * chain.P).transpose() - mu).cwiseAbs().maxCoeff();
  if (residual > 1e-10 || mu.minCoeff() <= 0.0)
    throw StructuralError("stationary_distribution: no strictly positive fixed point (chain not ergodic)");
  return mu;
}

std::pair<double, Eigen::VectorXd> relative_value_function(
    const PolicyMarkovChain& chain, const Eigen::VectorXd& mu) {
  const int n = chain.n;
  if (mu.size() != n)
    throw ParameterError("relative_value_function: mu length mismatch");
  const double g = mu.dot(chain.R);

  Eigen::MatrixXd M = Eigen::MatrixXd::Identity(n, n) - chain.P +
                      Eigen::VectorXd::Ones(n) * mu.transpose();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
  if (!lu.isInvertible())
    throw StructuralError("relative_value_function: singular system (chain not ergodic)");
  Eigen::VectorXd w = lu.solve(chain.R - g * Eigen::VectorXd::Ones(n));
  // The exact solution is already centered; remove the numerical residue
  // (the defining identity is invariant to constant shifts).
  w.array() -= mu.dot(w);
  return {g, w};
}

MixingFit mixing_fit(const PolicyMarkovChain& chain, const Eigen::VectorXd& mu,
                     int horizon) {
  if (horizon < 1) throw ParameterError("mixing_fit: horizon must be >= 1");
  if (mu.size() != chain.n) throw ParameterError("mixing_fit: mu length mismatch");
  const int n = chain.n;

  MixingFit fit;
  fit.d.resize(horizon + 1);
  Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(n, n);
  for (int tau = 0; tau <= horizon; ++tau) {
    if (tau > 0) Q = Q * chain.P;
    double worst = 0.0;
    for (int s = 0; s < n; ++s)
      worst = std::max(worst, (Q.row(s).transpose() - mu).cwiseAbs().sum());
    fit.d[tau] = worst;
  }

  // Least-squares line through (tau, log d(tau)) above an underflow floor,
  // then the envelope constant that makes C beta^tau dominate every sample.
  const double floor = 1e-13;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  long m = 0;
  for (int tau = 0; tau <= horizon; ++tau) {
    if (fit.d[tau] <= floor) continue;
    double x = tau, y = std::log(fit.d[tau]);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
    ++m;
  }
  if (m >= 2 && sxx * m - sx * sx > 0) {
    double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    fit.beta = std::clamp(std::exp(slope), 0.0, 1.0 - 1e-12);
  } else {
    fit.beta = 0.0;  // mixes below the floor within one step
  }
  double C = 0.0;
  for (int tau = 0; tau <= horizon; ++tau) {
    if (fit.d[tau] <= floor) continue;
    C = std::max(C, fit.d[tau] / std::pow(fit.beta, tau));
  }
  fit.C = std::max(C, 1.0);
  return fit;
}

long MixingFit::tau_mix(double eps) const {
  if (!(eps > 0.0)) throw ParameterError("tau_mix: eps must be positive");
  for (size_t tau = 0; tau < d.size(); ++tau)
    if (d[tau] <= eps) return static_cast<long>(tau);
  // Not reached within the computed horizon: extrapolate the envelope.
  if (beta <= 0.0 || beta >= 1.0) return static_cast<long>(d.size());
  double t = std::ceil(std::log(eps / C) / std::log(beta));
  return std::max(static_cast<long>(d.size()), static_cast<long>(t));
}

StationaryAnalysis analyze_chain(const PolicyMarkovChain& chain, int mix_horizon) {
  StationaryAnalysis a;
  a.mu = stationary_distribution(chain);
  a.mu_min = a.mu.minCoeff();
  auto [g, w] = relative_value_function(chain, a.mu);
  a.g = g;
  a.w_star = std::move(w);
  MixingFit fit = mixing_fit(chain, a.mu, mix_horizon);
  a.mix_C = fit.C;
  a.mix_beta = fit.beta;
  return a;
}

}  // namespace avgtd
