#include "beliefvs/random.hpp"

#include <string>

#include "beliefvs/error.hpp"

namespace beliefvs {

namespace {

void dirichlet_row(std::span<double> row, double sparsity, Rng& rng) {
  std::exponential_distribution<double> draw(1.0);
  std::bernoulli_distribution zero(sparsity);
  double sum = 0.0;
  for (double& p : row) {
    p = zero(rng) ? 0.0 : draw(rng);
    sum += p;
  }
  if (sum <= 0.0) {
    std::uniform_int_distribution<std::size_t> pick(0, row.size() - 1);
    row[pick(rng)] = 1.0;
    return;
  }
  for (double& p : row) p /= sum;
}

}  // namespace

BeliefState random_belief(std::size_t dim, Rng& rng) {
  if (dim == 0) throw InputError("random_belief: dimension must be positive");
  Vec probs(dim);
  dirichlet_row(probs, 0.0, rng);
  return BeliefState(std::move(probs));
}

Pomdp random_pomdp(const RandomPomdpOptions& options, Rng& rng) {
  if (options.num_variables == 0 || options.num_variables > kMaxVariables) {
    throw InputError("random_pomdp: unsupported variable count");
  }
  if (options.num_actions == 0 || options.num_observations == 0) {
    throw InputError("random_pomdp: need at least one action and one observation");
  }
  if (!(options.sparsity >= 0.0 && options.sparsity < 1.0)) {
    throw InputError("random_pomdp: sparsity must lie in [0, 1)");
  }
  Pomdp model;
  for (std::size_t i = 0; i < options.num_variables; ++i) {
    model.variables.push_back("X" + std::to_string(i));
  }
  for (std::size_t a = 0; a < options.num_actions; ++a) model.actions.push_back("a" + std::to_string(a));
  for (std::size_t z = 0; z < options.num_observations; ++z) {
    model.observations.push_back("z" + std::to_string(z));
  }
  const std::size_t states = model.num_states();
  for (std::size_t a = 0; a < options.num_actions; ++a) {
    Table t(states, states);
    for (std::size_t s = 0; s < states; ++s) dirichlet_row(t.row(s), options.sparsity, rng);
    model.transition.push_back(std::move(t));
    Table o(states, options.num_observations);
    for (std::size_t s = 0; s < states; ++s) dirichlet_row(o.row(s), options.sparsity, rng);
    model.observation.push_back(std::move(o));
  }
  std::uniform_real_distribution<double> reward(0.0, 10.0);
  model.reward.resize(states);
  for (double& r : model.reward) r = reward(rng);
  model.discount = options.discount;
  model.validate();
  return model;
}

}  // namespace beliefvs
