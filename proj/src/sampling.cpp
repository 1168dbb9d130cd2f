#include "avgtd/sampling.hpp"

#include <algorithm>
#include <cmath>

#include "avgtd/errors.hpp"

namespace avgtd {

uint64_t mix64(uint64_t x) {
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::pair<uint64_t, uint64_t> seed_split(uint64_t seed, uint64_t run_index) {
  constexpr uint64_t golden = 0x9E3779B97F4A7C15ULL;
  return {mix64(seed + golden * (2 * run_index + 1)),
          mix64(seed + golden * (2 * run_index + 2))};
}

int categorical_from_cdf(const std::vector<double>& cdf, double u) {
  if (!(u > 0.0 && u <= 1.0))
    throw ParameterError("categorical_from_cdf: u must lie in (0,1]");
  auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
  if (it == cdf.end()) --it;  // guard: final entry is forced to 1.0
  return static_cast<int>(it - cdf.begin());
}

namespace {

std::vector<double> build_cdf(const Eigen::VectorXd& p, const char* what) {
  const int n = static_cast<int>(p.size());
  std::vector<double> cdf(n);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    if (p(i) < 0.0) throw StructuralError(std::string(what) + ": negative probability");
    acc += p(i);
    cdf[i] = acc;
  }
  if (std::abs(acc - 1.0) > 1e-9)
    throw StructuralError(std::string(what) + ": probabilities do not sum to 1");
  cdf[n - 1] = 1.0;  // fixed boundary so u = 1 always resolves
  return cdf;
}

}  // namespace

TrajectorySampler::TrajectorySampler(SamplingMode mode,
                                     const PolicyMarkovChain& chain,
                                     const Eigen::VectorXd& mu, uint64_t seed,
                                     int start_state)
    : mode_(mode),
      n_(chain.n),
      rng_main_(0),
      rng_hat_(0),
      s_cur_(start_state),
      s_hat_cur_(start_state) {
  if (start_state < 0 || start_state >= n_)
    throw ParameterError("TrajectorySampler: start state out of range");
  if (mu.size() != n_)
    throw ParameterError("TrajectorySampler: mu length mismatch");
  row_cdf_.reserve(n_);
  for (int s = 0; s < n_; ++s)
    row_cdf_.push_back(build_cdf(chain.P.row(s).transpose(), "transition row"));
  mu_cdf_ = build_cdf(mu, "stationary distribution");
  auto [main_seed, hat_seed] = seed_split(seed, 0);
  rng_main_ = SplitMix64(main_seed);
  rng_hat_ = SplitMix64(hat_seed);
}

int TrajectorySampler::draw_from_cdf(const std::vector<double>& cdf,
                                     SplitMix64& rng) {
  return categorical_from_cdf(cdf, rng.uniform01());
}

Transition TrajectorySampler::next_transition() {
  switch (mode_) {
    case SamplingMode::markov_single: {
      int s = s_cur_;
      int s_next = draw_from_cdf(row_cdf_[s], rng_main_);
      s_cur_ = s_next;
      return {s, s_next, -1};
    }
    case SamplingMode::markov_double: {
      int s = s_cur_;
      int s_hat = s_hat_cur_;
      int s_next = draw_from_cdf(row_cdf_[s], rng_main_);
      s_hat_cur_ = draw_from_cdf(row_cdf_[s_hat], rng_hat_);
      s_cur_ = s_next;
      return {s, s_next, s_hat};
    }
    case SamplingMode::iid: {
      int s = draw_from_cdf(mu_cdf_, rng_main_);
      int s_next = draw_from_cdf(row_cdf_[s], rng_main_);
      int s_hat = draw_from_cdf(mu_cdf_, rng_hat_);
      return {s, s_next, s_hat};
    }
  }
  throw ParameterError("TrajectorySampler: unknown mode");
}

}  // namespace avgtd
