#pragma once
#include <Eigen/Dense>

#include "avgtd/geometry.hpp"
#include "avgtd/markov_chain.hpp"

namespace avgtd {

// A fully assembled evaluation problem with its exact fixed point.
struct EvalProblem {
  PolicyMarkovChain chain;
  StationaryAnalysis analysis;
  FeatureMap features;
  Eigen::VectorXd theta_star;  // unique solution of the projected system
  Eigen::VectorXd w_lin;       // Phi * theta_star
};

// Solves Phi^T D (I - Pi P) Phi theta = Phi^T D Pi R by dense LU
// (Pi = I - e mu^T). The system matrix is nonsingular whenever the feature
// columns are independent.
Eigen::VectorXd solve_theta_star(const PolicyMarkovChain& chain,
                                 const StationaryAnalysis& analysis,
                                 const FeatureMap& features);

EvalProblem assemble_problem(PolicyMarkovChain chain,
                             StationaryAnalysis analysis, FeatureMap features);

// || A theta_star - b ||_2 / (1 + ||b||_2) for the system above.
double projected_bellman_residual(const EvalProblem& problem);

// Mean update direction of the stochastic recursion:
// hbar(theta) = Phi^T D (R + P Phi theta - Phi theta)
//             - Phi^T mu mu^T (R + Phi theta).
// Vanishes exactly at theta_star.
Eigen::VectorXd expected_update_field(const EvalProblem& problem,
                                      const Eigen::VectorXd& theta);

}  // namespace avgtd
