#pragma once
#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

namespace avgtd {

// Finite-state Markov chain induced by a fixed policy: a row-stochastic
// transition matrix plus the expected one-step reward of each state.
struct PolicyMarkovChain {
  int n = 0;
  Eigen::MatrixXd P;  // n x n, each row sums to 1
  Eigen::VectorXd R;  // length n
  double r_max = 0;   // max_s |R[s]|
};

// Validates shape, entry ranges and row sums (1e-12) before constructing.
PolicyMarkovChain make_chain(Eigen::MatrixXd P, Eigen::VectorXd R);

struct ValidationReport {
  double max_row_sum_deviation = 0;
  int negative_entries = 0;
  bool irreducible = false;
  bool aperiodic = false;
  int period = 0;  // gcd of cycle lengths on the part reachable from state 0
  bool pass() const;
  std::string describe() const;
};

// Structural check of irreducibility (strong connectivity of the
// positive-entry graph) and aperiodicity (cycle-length gcd equal to 1).
ValidationReport validate_chain(const PolicyMarkovChain& chain);

// For each row with k > 0 zero entries: zero entries receive epsilon/k and
// nonzero entries are scaled by (1 - epsilon). Rows without zeros are kept.
PolicyMarkovChain make_ergodic(const PolicyMarkovChain& chain, double epsilon);

// Unique mu with mu^T P = mu^T, sum(mu) = 1, via a direct linear solve of the
// rank-completed system. Throws StructuralError on reducible chains.
Eigen::VectorXd stationary_distribution(const PolicyMarkovChain& chain);

// Returns (g, w): g = mu^T R and w the unique solution of
// (I - P + e mu^T) w = R - g e, i.e. w + g e = P w + R with mu^T w = 0.
std::pair<double, Eigen::VectorXd> relative_value_function(
    const PolicyMarkovChain& chain, const Eigen::VectorXd& mu);

// Geometric mixing envelope d(tau) <= C beta^tau fitted to the worst-case
// (over start states) L1 distance between the tau-step law and mu.
struct MixingFit {
  double C = 1.0;
  double beta = 0.0;
  std::vector<double> d;  // d[tau] for tau = 0..horizon
  // First tau with d(tau) <= eps; envelope extrapolation past the horizon.
  long tau_mix(double eps) const;
};

MixingFit mixing_fit(const PolicyMarkovChain& chain, const Eigen::VectorXd& mu,
                     int horizon);

struct StationaryAnalysis {
  Eigen::VectorXd mu;
  double mu_min = 0;
  double g = 0;
  Eigen::VectorXd w_star;
  double mix_C = 1.0;
  double mix_beta = 0.0;
};

StationaryAnalysis analyze_chain(const PolicyMarkovChain& chain,
                                 int mix_horizon = 2000);

}  // namespace avgtd
