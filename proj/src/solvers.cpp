#include "avgtd/solvers.hpp"

#include <iostream>
#include <sstream>
#include <utility>

#include "avgtd/errors.hpp"

namespace avgtd {

namespace {

// System matrix and right-hand side of the projected fixed-point equation.
std::pair<Eigen::MatrixXd, Eigen::VectorXd> fixed_point_system(
    const PolicyMarkovChain& chain, const StationaryAnalysis& analysis,
    const FeatureMap& features) {
  const int n = chain.n;
  const Eigen::MatrixXd& Phi = features.phi;
  Eigen::MatrixXd Pi = pi_projection(n, analysis.mu);
  Eigen::MatrixXd D = analysis.mu.asDiagonal();
  Eigen::MatrixXd A =
      Phi.transpose() * D *
      (Eigen::MatrixXd::Identity(n, n) - Pi * chain.P) * Phi;
  Eigen::VectorXd b = Phi.transpose() * (D * (Pi * chain.R));
  return {std::move(A), std::move(b)};
}

}  // namespace

Eigen::VectorXd solve_theta_star(const PolicyMarkovChain& chain,
                                 const StationaryAnalysis& analysis,
                                 const FeatureMap& features) {
  const double e1 = eta1(features, chain, analysis.mu);  // throws if rank-deficient
  if (e1 <= 1e-12) {
    std::ostringstream os;
    os << "solve_theta_star: system matrix is numerically singular "
          "(smallest quadratic-form value "
       << e1 << "; feature columns nearly dependent)";
    throw StructuralError(os.str());
  }
  auto [A, b] = fixed_point_system(chain, analysis, features);

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
  const auto& sv = svd.singularValues();
  if (sv(sv.size() - 1) > 0.0 && sv(0) / sv(sv.size() - 1) > 1e12)
    std::cerr << "solve_theta_star: warning: condition number "
              << sv(0) / sv(sv.size() - 1) << " exceeds 1e12\n";

  return Eigen::PartialPivLU<Eigen::MatrixXd>(A).solve(b);
}

EvalProblem assemble_problem(PolicyMarkovChain chain,
                             StationaryAnalysis analysis,
                             FeatureMap features) {
  EvalProblem p;
  p.theta_star = solve_theta_star(chain, analysis, features);
  p.w_lin = features.phi * p.theta_star;
  p.chain = std::move(chain);
  p.analysis = std::move(analysis);
  p.features = std::move(features);
  return p;
}

double projected_bellman_residual(const EvalProblem& problem) {
  auto [A, b] = fixed_point_system(problem.chain, problem.analysis,
                                   problem.features);
  return (A * problem.theta_star - b).norm() / (1.0 + b.norm());
}

Eigen::VectorXd expected_update_field(const EvalProblem& problem,
                                      const Eigen::VectorXd& theta) {
  if (theta.size() != problem.features.d)
    throw ParameterError("expected_update_field: theta dimension mismatch");
  const Eigen::MatrixXd& Phi = problem.features.phi;
  const Eigen::VectorXd& mu = problem.analysis.mu;
  Eigen::VectorXd v = Phi * theta;
  Eigen::VectorXd bellman = problem.chain.R + problem.chain.P * v - v;
  return Phi.transpose() * mu.cwiseProduct(bellman) -
         (Phi.transpose() * mu) * (mu.dot(problem.chain.R + v));
}

}  // namespace avgtd
