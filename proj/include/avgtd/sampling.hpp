#pragma once
#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "avgtd/markov_chain.hpp"

namespace avgtd {

// splitmix64: a tiny 64-bit generator fixed by its reference constants so
// that every implementation (any language) reproduces identical streams.
struct SplitMix64 {
  uint64_t state = 0;
  explicit SplitMix64(uint64_t seed) : state(seed) {}
  uint64_t next() {
    uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
  // Uniform on (0, 1]: ((x >> 11) + 1) * 2^-53. Never returns 0, so p = 0
  // outcomes are unreachable under the right-closed draw convention.
  double uniform01() {
    return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
  }
};

// SplitMix64 finalizer; bijective on 64-bit words.
uint64_t mix64(uint64_t x);

// Two decorrelated stream seeds for (seed, run_index); injective by
// construction, so derived seeds never collide.
std::pair<uint64_t, uint64_t> seed_split(uint64_t seed, uint64_t run_index);

// Smallest i with cdf[i] >= u for u in (0, 1] (right-closed intervals).
int categorical_from_cdf(const std::vector<double>& cdf, double u);

enum class SamplingMode { markov_single, markov_double, iid };

struct Transition {
  int s;
  int s_next;
  int s_hat;  // -1 in markov_single mode
};

// Seeded trajectory source. markov_single walks one chain; markov_double
// walks a second independent chain for s_hat; iid redraws s from mu each
// call and s_hat from an independent stream.
class TrajectorySampler {
 public:
  TrajectorySampler(SamplingMode mode, const PolicyMarkovChain& chain,
                    const Eigen::VectorXd& mu, uint64_t seed,
                    int start_state = 0);
  Transition next_transition();
  SamplingMode mode() const { return mode_; }

 private:
  int draw_from_cdf(const std::vector<double>& cdf, SplitMix64& rng);
  SamplingMode mode_;
  int n_;
  std::vector<std::vector<double>> row_cdf_;
  std::vector<double> mu_cdf_;
  SplitMix64 rng_main_;
  SplitMix64 rng_hat_;
  int s_cur_;
  int s_hat_cur_;
};

}  // namespace avgtd
