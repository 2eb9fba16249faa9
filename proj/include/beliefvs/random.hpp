#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

#include "beliefvs/model.hpp"

namespace beliefvs {

using Rng = std::mt19937_64;

// Uniform on the probability simplex: normalized unit-rate exponentials.
BeliefState random_belief(std::size_t dim, Rng& rng);

struct RandomPomdpOptions {
  std::size_t num_variables = 3;
  std::size_t num_actions = 2;
  std::size_t num_observations = 2;
  // Probability that a table entry is zeroed before row normalization.
  double sparsity = 0.0;
  double discount = 0.95;
};

// Dense Dirichlet(1) rows for transitions and observations, rewards uniform
// on [0, 10]. Deterministic for a given generator state.
Pomdp random_pomdp(const RandomPomdpOptions& options, Rng& rng);

}  // namespace beliefvs
