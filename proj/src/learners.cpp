#include "avgtd/learners.hpp"

#include <cmath>

#include "avgtd/errors.hpp"

namespace avgtd {

namespace {

void check_index(int s, int n, const char* who) {
  if (s < 0 || s >= n) throw ParameterError(std::string(who) + ": state index out of range");
}

void check_finite(const Eigen::VectorXd& v, const char* who) {
  if (!v.allFinite())
    throw StructuralError(std::string(who) + ": parameter vector diverged (NaN/Inf)");
}

}  // namespace

StepSchedule StepSchedule::constant_rate(double alpha, double rho0) {
  if (!(alpha > 0.0)) throw ParameterError("StepSchedule: alpha must be positive");
  if (!(rho0 > 0.0 && rho0 <= 1.0)) throw ParameterError("StepSchedule: rho0 must lie in (0,1]");
  StepSchedule s;
  s.kind = Kind::constant;
  s.alpha = alpha;
  s.rho0 = rho0;
  return s;
}

StepSchedule StepSchedule::decaying_rate(double a, double c0, double xi, double rho0) {
  if (!(a > 0.0) || !(c0 > 0.0)) throw ParameterError("StepSchedule: need a > 0 and c0 > 0");
  if (!(xi > 0.0 && xi <= 1.0)) throw ParameterError("StepSchedule: xi must lie in (0,1]");
  if (!(rho0 > 0.0 && rho0 <= 1.0)) throw ParameterError("StepSchedule: rho0 must lie in (0,1]");
  StepSchedule s;
  s.kind = Kind::decaying;
  s.a = a;
  s.c0 = c0;
  s.xi = xi;
  s.rho0 = rho0;
  return s;
}

std::pair<double, double> step_size(const StepSchedule& schedule, long t) {
  if (t < 0) throw ParameterError("step_size: t must be nonnegative");
  double alpha = schedule.kind == StepSchedule::Kind::constant
                     ? schedule.alpha
                     : schedule.a / std::pow(static_cast<double>(t) + schedule.c0, schedule.xi);
  return {alpha, schedule.rho0 * alpha};
}

void double_chain_step(DoubleChainState& state, int s, int s_next, int s_hat,
                       const Eigen::VectorXd& rewards,
                       const FeatureMap& features, double alpha_t) {
  const int n = static_cast<int>(features.phi.rows());
  check_index(s, n, "double_chain_step");
  check_index(s_next, n, "double_chain_step");
  check_index(s_hat, n, "double_chain_step");

  const double pred = features.phi.row(s).dot(state.theta);
  const double td = rewards(s) + features.phi.row(s_next).dot(state.theta) - pred;
  state.theta += alpha_t * (td * features.phi.row(s).transpose() -
                            (rewards(s) + pred) * features.phi.row(s_hat).transpose());
  check_finite(state.theta, "double_chain_step");
  ++state.t;
}

void single_chain_step(SingleChainState& state, int s, int s_next,
                       const Eigen::VectorXd& rewards,
                       const FeatureMap& features, double alpha_t,
                       double beta_t) {
  const int n = static_cast<int>(features.phi.rows());
  check_index(s, n, "single_chain_step");
  check_index(s_next, n, "single_chain_step");
  if (!(state.r_theta > 0.0) || !(state.r_w > 0.0))
    throw ParameterError("single_chain_step: projection radii must be positive");

  const double pred = features.phi.row(s).dot(state.theta);
  const double td = rewards(s) + features.phi.row(s_next).dot(state.theta) - pred;

  // Both updates read the pre-step state; w's new value never feeds theta.
  Eigen::VectorXd theta_next =
      state.theta + alpha_t * (td * features.phi.row(s).transpose() -
                               (rewards(s) + pred) * state.w);
  Eigen::VectorXd w_next =
      state.w + beta_t * (features.phi.row(s).transpose() - state.w);

  project_to_ball(w_next, state.r_w);
  project_to_ball(theta_next, state.r_theta);
  state.w = std::move(w_next);
  state.theta = std::move(theta_next);
  check_finite(state.theta, "single_chain_step");
  check_finite(state.w, "single_chain_step");
  ++state.t;
}

void baseline_coupled_sa_step(CoupledSAState& state, int s, int s_next,
                              const Eigen::VectorXd& rewards,
                              const FeatureMap& features, double alpha_t) {
  const int n = static_cast<int>(features.phi.rows());
  check_index(s, n, "baseline_coupled_sa_step");
  check_index(s_next, n, "baseline_coupled_sa_step");

  state.g_est += alpha_t * (rewards(s) - state.g_est);
  const double td = rewards(s) - state.g_est +
                    features.phi.row(s_next).dot(state.theta) -
                    features.phi.row(s).dot(state.theta);
  state.theta += alpha_t * td * features.phi.row(s).transpose();
  check_finite(state.theta, "baseline_coupled_sa_step");
  if (!std::isfinite(state.g_est))
    throw StructuralError("baseline_coupled_sa_step: reward estimate diverged");
  ++state.t;
}

void reward_estimate_update(RewardEstimator& est, double r) {
  est.sum += r;
  ++est.count;
  est.estimate = est.sum / est.count;
}

void project_to_ball(Eigen::VectorXd& v, double radius) {
  const double nrm = v.norm();
  if (!(nrm > radius)) return;
  v *= radius / nrm;
  // The rescale can land an ulp outside; contract until the recomputed norm
  // really satisfies the comparison.
  while (v.norm() > radius) v *= std::nextafter(1.0, 0.0);
}

}  // namespace avgtd
