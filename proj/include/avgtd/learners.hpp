#pragma once
#include <Eigen/Dense>
#include <utility>

#include "avgtd/geometry.hpp"

namespace avgtd {

// Step-size schedule: constant alpha, or alpha_t = a/(t + c0)^xi. The
// companion rate is beta_t = rho0 * alpha_t.
struct StepSchedule {
  enum class Kind { constant, decaying };
  Kind kind = Kind::constant;
  double alpha = 0.0;              // constant case
  double a = 0.0, c0 = 0.0;        // decaying case
  double xi = 1.0;                 // decaying exponent, in (0, 1]
  double rho0 = 1.0;               // beta_t / alpha_t, in (0, 1]

  static StepSchedule constant_rate(double alpha, double rho0 = 1.0);
  static StepSchedule decaying_rate(double a, double c0, double xi,
                                    double rho0 = 1.0);
};

// (alpha_t, beta_t) at step t >= 0.
std::pair<double, double> step_size(const StepSchedule& schedule, long t);

struct DoubleChainState {
  Eigen::VectorXd theta;
  long t = 0;
};

struct SingleChainState {
  Eigen::VectorXd theta;
  Eigen::VectorXd w;
  double r_theta = 0;  // projection radius for theta
  double r_w = 0;      // projection radius for w
  long t = 0;
};

struct CoupledSAState {
  Eigen::VectorXd theta;
  double g_est = 0.0;
  long t = 0;
};

// Running average of observed rewards; estimate = sum / count.
struct RewardEstimator {
  double sum = 0.0;
  long count = 0;
  double estimate = 0.0;
};

// theta += alpha * (f + g) with
//   f = -(r_s + phi(s)^T theta) phi(s_hat)
//   g = (r_s + phi(s')^T theta - phi(s)^T theta) phi(s).
void double_chain_step(DoubleChainState& state, int s, int s_next, int s_hat,
                       const Eigen::VectorXd& rewards,
                       const FeatureMap& features, double alpha_t);

// w     <- Proj_{r_w}(w + beta (phi(s) - w))
// theta <- Proj_{r_theta}(theta + alpha [(r_s + phi(s')^T theta
//            - phi(s)^T theta) phi(s) - (r_s + phi(s)^T theta) w])
// The theta update reads the pre-update w.
void single_chain_step(SingleChainState& state, int s, int s_next,
                       const Eigen::VectorXd& rewards,
                       const FeatureMap& features, double alpha_t,
                       double beta_t);

// Comparator: g_est <- g_est + alpha (r_s - g_est), then
// theta += alpha (r_s - g_est + phi(s')^T theta - phi(s)^T theta) phi(s).
void baseline_coupled_sa_step(CoupledSAState& state, int s, int s_next,
                              const Eigen::VectorXd& rewards,
                              const FeatureMap& features, double alpha_t);

void reward_estimate_update(RewardEstimator& est, double r);

// Radial (Euclidean metric) projection onto the ball of the given radius;
// guarantees v.norm() <= radius as a literal comparison afterwards.
void project_to_ball(Eigen::VectorXd& v, double radius);

}  // namespace avgtd
