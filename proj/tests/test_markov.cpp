#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "avgtd/errors.hpp"
#include "avgtd/markov_chain.hpp"
#include "helpers.hpp"

using namespace avgtd;
using testutil::random_ergodic_chain;

namespace {

PolicyMarkovChain two_state(double p01, double p10, double r0, double r1) {
  Eigen::MatrixXd P(2, 2);
  P << 1.0 - p01, p01, p10, 1.0 - p10;
  Eigen::VectorXd R(2);
  R << r0, r1;
  return make_chain(P, R);
}

PolicyMarkovChain reflecting_walk(int n) {
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
  for (int s = 0; s < n; ++s) {
    int left = s == 0 ? 0 : s - 1;
    int right = s == n - 1 ? n - 1 : s + 1;
    P(s, left) += 0.5;
    P(s, right) += 0.5;
  }
  Eigen::VectorXd R = Eigen::VectorXd::Zero(n);
  R(n - 1) = 1.0;
  return make_chain(P, R);
}

}  // namespace

TEST_CASE("make_chain validates shape, stochasticity and rewards") {
  Eigen::MatrixXd P(2, 2);
  P << 0.5, 0.5, 1.0, 0.0;
  Eigen::VectorXd R(2);
  R << 1.0, -2.0;
  auto chain = make_chain(P, R);
  CHECK(chain.n == 2);
  CHECK(chain.r_max == 2.0);

  Eigen::MatrixXd bad_sum(2, 2);
  bad_sum << 0.5, 0.6, 1.0, 0.0;
  CHECK_THROWS_AS(make_chain(bad_sum, R), ParameterError);

  Eigen::MatrixXd negative(2, 2);
  negative << 1.2, -0.2, 1.0, 0.0;
  CHECK_THROWS_AS(make_chain(negative, R), ParameterError);

  Eigen::MatrixXd rect(2, 3);
  rect.setZero();
  CHECK_THROWS_AS(make_chain(rect, R), ParameterError);

  Eigen::VectorXd short_R(1);
  short_R << 0.0;
  CHECK_THROWS_AS(make_chain(P, short_R), ParameterError);

  Eigen::VectorXd nan_R(2);
  nan_R << 0.0, std::nan("");
  CHECK_THROWS_AS(make_chain(P, nan_R), ParameterError);
}

TEST_CASE("validate_chain classifies periodic and reducible chains") {
  auto cycle = two_state(1.0, 1.0, 0.0, 1.0);  // deterministic 2-cycle
  auto rep = validate_chain(cycle);
  CHECK(rep.irreducible);
  CHECK_FALSE(rep.aperiodic);
  CHECK(rep.period == 2);
  CHECK_FALSE(rep.pass());
  CHECK(rep.describe().find("periodic (period 2)") != std::string::npos);

  Eigen::MatrixXd P(2, 2);
  P << 1.0, 0.0, 0.5, 0.5;  // state 1 unreachable from state 0
  Eigen::VectorXd R = Eigen::VectorXd::Zero(2);
  auto reducible = make_chain(P, R);
  auto rep2 = validate_chain(reducible);
  CHECK_FALSE(rep2.irreducible);
  CHECK_FALSE(rep2.pass());
  CHECK(rep2.describe().find("reducible") != std::string::npos);

  auto walk = reflecting_walk(5);
  auto rep3 = validate_chain(walk);
  CHECK(rep3.irreducible);
  CHECK(rep3.aperiodic);
  CHECK(rep3.pass());
  CHECK(rep3.max_row_sum_deviation == 0.0);
  CHECK(rep3.negative_entries == 0);
}

TEST_CASE("make_ergodic patches exactly the worked row") {
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(5, 5);
  P.col(2).setOnes();
  Eigen::VectorXd R = Eigen::VectorXd::Zero(5);
  auto patched = make_ergodic(make_chain(P, R), 0.1);
  Eigen::VectorXd expected(5);
  expected << 0.025, 0.025, 0.9, 0.025, 0.025;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j)
      CHECK(patched.P(i, j) - expected(j) == 0.0);  // bitwise-exact arithmetic

  CHECK_THROWS_AS(make_ergodic(patched, 0.0), ParameterError);
  CHECK_THROWS_AS(make_ergodic(patched, 1.0), ParameterError);

  // Rows without zero entries are untouched.
  auto dense = two_state(0.3, 0.4, 1.0, 0.0);
  auto same = make_ergodic(dense, 0.5);
  CHECK((same.P - dense.P).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("make_ergodic keeps random sparse chains stochastic") {
  SplitMix64 rng(99);
  for (int rep = 0; rep < 20; ++rep) {
    int n = 3 + static_cast<int>(rng.next() % 8);
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      // A single deterministic transition per row: plenty of zeros.
      P(i, static_cast<int>(rng.next() % n)) = 1.0;
    }
    auto patched = make_ergodic(make_chain(P, Eigen::VectorXd::Zero(n)), 0.3);
    for (int i = 0; i < n; ++i) {
      CHECK(std::abs(patched.P.row(i).sum() - 1.0) <= 1e-12);
      CHECK(patched.P.row(i).minCoeff() > 0.0);
    }
    CHECK(validate_chain(patched).pass());
  }
}

TEST_CASE("stationary distribution matches hand and power-iteration values") {
  auto chain = two_state(0.5, 1.0, 0.0, 0.0);
  auto mu = stationary_distribution(chain);
  CHECK(std::abs(mu(0) - 2.0 / 3.0) <= 1e-12);
  CHECK(std::abs(mu(1) - 1.0 / 3.0) <= 1e-12);

  auto walk = reflecting_walk(5);
  auto mu_walk = stationary_distribution(walk);
  for (int s = 0; s < 5; ++s) CHECK(std::abs(mu_walk(s) - 0.2) <= 1e-12);

  SplitMix64 rng(7);
  for (int rep = 0; rep < 5; ++rep) {
    auto c = random_ergodic_chain(rng, 10);
    auto direct = stationary_distribution(c);
    auto iterated = testutil::power_iteration_mu(c.P);
    CHECK((direct - iterated).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK(std::abs(direct.sum() - 1.0) <= 1e-12);
    CHECK(direct.minCoeff() > 0.0);
  }
}

TEST_CASE("stationary distribution rejects reducible chains") {
  Eigen::MatrixXd P(2, 2);
  P << 1.0, 0.0, 0.5, 0.5;
  auto chain = make_chain(P, Eigen::VectorXd::Zero(2));
  CHECK_THROWS_AS(stationary_distribution(chain), StructuralError);
}

TEST_CASE("relative value function satisfies its defining identity") {
  auto walk = reflecting_walk(5);
  auto mu = stationary_distribution(walk);
  auto [g, w] = relative_value_function(walk, mu);
  CHECK(std::abs(g - 0.2) <= 1e-12);
  Eigen::VectorXd expected(5);
  expected << -1.6, -1.2, -0.4, 0.8, 2.4;
  CHECK((w - expected).cwiseAbs().maxCoeff() <= 1e-10);

  SplitMix64 rng(11);
  for (int rep = 0; rep < 10; ++rep) {
    int n = 2 + static_cast<int>(rng.next() % 11);
    auto c = random_ergodic_chain(rng, n);
    auto m = stationary_distribution(c);
    auto [gain, rel] = relative_value_function(c, m);
    Eigen::VectorXd lhs = rel + gain * Eigen::VectorXd::Ones(n);
    Eigen::VectorXd rhs = c.P * rel + c.R;
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(std::abs(m.dot(rel)) <= 1e-12);
    CHECK(std::abs(gain - m.dot(c.R)) <= 1e-14);
  }
}

TEST_CASE("relative value function agrees with the centered power series") {
  SplitMix64 rng(17);
  for (int rep = 0; rep < 5; ++rep) {
    auto c = random_ergodic_chain(rng, 10);
    auto mu = stationary_distribution(c);
    auto [g, w] = relative_value_function(c, mu);
    auto fit = mixing_fit(c, mu, 400);
    long cutoff = 10 * fit.tau_mix(1e-6);
    REQUIRE(cutoff >= 1);

    Eigen::VectorXd partial = Eigen::VectorXd::Zero(10);
    Eigen::VectorXd term = c.R;  // P^0 R
    Eigen::VectorXd ge = g * Eigen::VectorXd::Ones(10);
    for (long k = 0; k < cutoff; ++k) {
      partial += term - ge;
      term = c.P * term;
    }
    CHECK((partial - w).cwiseAbs().maxCoeff() <= 1e-5);
  }
}

TEST_CASE("gain and relative values shift correctly under constant rewards") {
  SplitMix64 rng(23);
  auto c = random_ergodic_chain(rng, 6);
  auto mu = stationary_distribution(c);
  auto [g, w] = relative_value_function(c, mu);

  auto shifted = make_chain(c.P, c.R + 3.5 * Eigen::VectorXd::Ones(6));
  auto [g2, w2] = relative_value_function(shifted, mu);
  CHECK(std::abs(g2 - (g + 3.5)) <= 1e-12);
  CHECK((w2 - w).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("mixing fit recovers the exact geometric decay of a lazy chain") {
  auto chain = two_state(0.1, 0.1, 0.0, 0.0);  // second eigenvalue 0.8
  auto mu = stationary_distribution(chain);
  auto fit = mixing_fit(chain, mu, 100);
  CHECK(std::abs(fit.beta - 0.8) <= 1e-9);
  // The envelope constant amplifies the fit's tiny beta error by the
  // horizon length, so it carries a looser tolerance than beta itself.
  CHECK(std::abs(fit.C - 1.0) <= 1e-5);
  CHECK(std::abs(fit.d[0] - 1.0) <= 1e-15);
  for (int tau = 0; tau <= 100; ++tau)
    CHECK(fit.C * std::pow(fit.beta, tau) >= fit.d[tau] - 1e-12);
  CHECK(fit.tau_mix(0.01) == 21);       // 0.8^21 < 0.01 < 0.8^20
  CHECK(fit.tau_mix(1e-300) == 3096);   // envelope extrapolation past horizon
  CHECK_THROWS_AS(fit.tau_mix(0.0), ParameterError);
  CHECK_THROWS_AS(mixing_fit(chain, mu, 0), ParameterError);
}

TEST_CASE("mixing fit dominates the observed decay on random chains") {
  SplitMix64 rng(31);
  for (int rep = 0; rep < 10; ++rep) {
    int n = 2 + static_cast<int>(rng.next() % 9);
    auto c = random_ergodic_chain(rng, n);
    auto mu = stationary_distribution(c);
    auto fit = mixing_fit(c, mu, 300);
    CHECK(fit.C >= 1.0);
    CHECK(fit.beta >= 0.0);
    CHECK(fit.beta < 1.0);
    for (size_t tau = 0; tau < fit.d.size(); ++tau)
      CHECK(fit.C * std::pow(fit.beta, static_cast<double>(tau)) >=
            fit.d[tau] - 1e-12);
    // d is monotone nonincreasing for these chains up to fp noise.
    for (size_t tau = 1; tau < fit.d.size(); ++tau)
      CHECK(fit.d[tau] <= fit.d[tau - 1] + 1e-12);
  }
}

TEST_CASE("one-step mixers fall below the envelope floor immediately") {
  Eigen::MatrixXd P(2, 2);
  P << 0.5, 0.5, 0.5, 0.5;
  auto chain = make_chain(P, Eigen::VectorXd::Zero(2));
  auto mu = stationary_distribution(chain);
  auto fit = mixing_fit(chain, mu, 50);
  CHECK(fit.beta == 0.0);
  CHECK(fit.C == 1.0);
  CHECK(fit.tau_mix(0.5) == 1);
  CHECK(fit.tau_mix(1e-20) == 1);
}

TEST_CASE("single-state chains are analyzable") {
  Eigen::MatrixXd P(1, 1);
  P << 1.0;
  Eigen::VectorXd R(1);
  R << 0.7;
  auto chain = make_chain(P, R);
  auto a = analyze_chain(chain, 50);
  CHECK(a.mu(0) == 1.0);
  CHECK(a.g == 0.7);
  CHECK(std::abs(a.w_star(0)) <= 1e-15);
  CHECK(validate_chain(chain).pass());
}

TEST_CASE("analyze_chain bundles the pieces consistently") {
  auto walk = reflecting_walk(5);
  auto a = analyze_chain(walk, 500);
  CHECK(std::abs(a.g - 0.2) <= 1e-12);
  CHECK(a.mu_min == a.mu.minCoeff());
  CHECK(a.mix_C >= 1.0);
  CHECK(a.mix_beta < 1.0);
  Eigen::VectorXd expected(5);
  expected << -1.6, -1.2, -0.4, 0.8, 2.4;
  CHECK((a.w_star - expected).cwiseAbs().maxCoeff() <= 1e-10);
}
