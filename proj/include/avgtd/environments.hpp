#pragma once
#include <cstdint>
#include <string>

#include "avgtd/markov_chain.hpp"

namespace avgtd {

// Synthetic policy-induced chains used by the harness. Dynamics are fixed
// here so every number in an experiment is reproducible from seeds alone.
struct EnvironmentSpec {
  enum class Kind { random_walk, gridworld, random_mdp, file };
  Kind kind = Kind::random_walk;
  int n = 0;               // random_walk / random_mdp state count
  int width = 0;           // gridworld
  int height = 0;          // gridworld
  double sparsity = 0.0;   // random_mdp: probability an entry is zeroed
  uint64_t seed = 0;       // random_mdp draw seed
  std::string path;        // file
};

// random_walk{n}: line of states, step left/right with prob 1/2, reflecting
// (stay) at the ends, reward 1 at the right end.
// gridworld{w,h}: uniform 4-neighbor policy, reflecting walls, reward 1 at
// the far corner.
// random_mdp{n,sparsity}: rows ~ symmetric Dirichlet(1) with entries dropped
// at the sparsity rate, rewards uniform in [0,1].
PolicyMarkovChain generate_environment(const EnvironmentSpec& spec);

}  // namespace avgtd
