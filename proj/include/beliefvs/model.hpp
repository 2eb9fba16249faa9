#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "beliefvs/alpha.hpp"
#include "beliefvs/linalg.hpp"

namespace beliefvs {

// Hard ceiling on declared variables. Dense tables make anything past ~12
// impractical; compile_model additionally guards on table size.
inline constexpr std::size_t kMaxVariables = 20;

// Bayes-rule normalizers below this mark an impossible observation.
inline constexpr double kZeroProbability = 1e-12;

// POMDP over n binary state variables. State index s encodes the joint
// instantiation: bit i of s is set iff variables[i] is true.
struct Pomdp {
  std::vector<std::string> variables;
  std::vector<std::string> actions;
  std::vector<std::string> observations;
  std::vector<Table> transition;   // per action, (s, s') -> P(s'|s,a)
  std::vector<Table> observation;  // per action, (s', z) -> P(z|s',a)
  Vec reward;                      // R(s)
  double discount = 1.0;

  std::size_t num_variables() const { return variables.size(); }
  std::size_t num_states() const { return std::size_t{1} << variables.size(); }
  std::size_t num_actions() const { return actions.size(); }
  std::size_t num_observations() const { return observations.size(); }

  // Throws InputError when table shapes or stochasticity are off.
  void validate() const;
};

class BeliefState {
 public:
  BeliefState() = default;
  // Validates: entries >= 0 and sum within 1e-9 of 1.
  explicit BeliefState(Vec probs);

  static BeliefState point_mass(std::size_t dim, std::size_t state);
  static BeliefState uniform(std::size_t dim);

  std::span<const double> probs() const { return probs_; }
  const Vec& vec() const { return probs_; }
  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t s) const { return probs_[s]; }

 private:
  Vec probs_;
};

// Builds dense tables from a model document (see README for the key set).
// CPT-specified transitions are multiplied out over the joint state space.
Pomdp compile_model(const nlohmann::json& doc);

// One-step prediction: sum_s P(s'|s,a) b(s).
Vec predict(const Pomdp& model, std::span<const double> belief, std::size_t action);

// P(z | b, a) computed from a predicted belief.
double observation_probability(const Pomdp& model, std::span<const double> predicted,
                               std::size_t action, std::size_t obs);

// b_az(s') ∝ P(z|s',a) sum_s P(s'|s,a) b(s). Throws ZeroProbabilityObservation
// when the normalizer is below kZeroProbability.
BeliefState belief_update(const Pomdp& model, const BeliefState& b, std::size_t action,
                          std::size_t obs);

struct ValueChoice {
  double value = 0.0;
  std::size_t index = 0;
};

// max_alpha b . alpha with ties broken by lowest index.
ValueChoice value_of(std::span<const double> belief, const AlphaSet& set);
inline ValueChoice value_of(const BeliefState& b, const AlphaSet& set) {
  return value_of(b.probs(), set);
}

}  // namespace beliefvs
