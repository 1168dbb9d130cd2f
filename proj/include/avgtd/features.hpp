#pragma once
#include <cstdint>

#include "avgtd/geometry.hpp"
#include "avgtd/markov_chain.hpp"

namespace avgtd {

// Draws an n x (d-2) 0/1 matrix with success probability bernoulli_p,
// appends the all-ones column and the relative-value column (so both stay
// representable), retries until the column rank is d, then rescales all rows
// uniformly so that max_s ||phi(s)||_2 = 1.
// With include_e_and_wstar = false all d columns are Bernoulli draws.
FeatureMap generate_features(const PolicyMarkovChain& chain,
                             const StationaryAnalysis& analysis, int d,
                             double bernoulli_p, uint64_t seed,
                             bool include_e_and_wstar = true);

}  // namespace avgtd
