#include "beliefvs/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "beliefvs/error.hpp"
#include "beliefvs/random.hpp"

namespace beliefvs {

namespace {

struct Walker {
  const Pomdp& model;
  const std::vector<AlphaSet>& stages;
  const SchemeAssignment& schemes;
  ApproxMode mode;

  // `approx` is the agent's belief before this stage's projection.
  double value(const BeliefState& exact, const BeliefState& approx, std::size_t k,
               bool first) const {
    if (k == 0) return 0.0;
    const AlphaSet& set = stages[k - 1];
    BeliefState used = approx;
    if (first || mode == ApproxMode::Successive) {
      const std::size_t region = value_of(approx, set).index;
      used = project(approx, schemes.scheme_for(set.stage, region));
    }
    const std::size_t action = set[value_of(used, set).index].action;

    double total = dot(exact.probs(), model.reward);
    if (k == 1) return total;
    const Vec predicted = predict(model, exact.probs(), action);
    double future = 0.0;
    for (std::size_t z = 0; z < model.num_observations(); ++z) {
      const double pz = observation_probability(model, predicted, action, z);
      if (pz < kZeroProbability) continue;
      BeliefState next_exact = belief_update(model, exact, action, z);
      BeliefState next_approx;
      try {
        next_approx = belief_update(model, used, action, z);
      } catch (const ZeroProbabilityObservation&) {
        next_approx = next_exact;
      }
      future += pz * value(next_exact, next_approx, k - 1, false);
    }
    return total + model.discount * future;
  }
};

}  // namespace

const char* to_string(ApproxMode mode) {
  return mode == ApproxMode::Single ? "single" : "successive";
}

std::optional<ApproxMode> parse_approx_mode(std::string_view name) {
  if (name == "single") return ApproxMode::Single;
  if (name == "successive") return ApproxMode::Successive;
  return std::nullopt;
}

double achieved_value(const Pomdp& model, const std::vector<AlphaSet>& stages,
                      const SchemeAssignment& schemes, const BeliefState& b0, ApproxMode mode,
                      std::size_t horizon, double branch_cap) {
  if (horizon == 0 || horizon > stages.size()) {
    throw InputError("achieved_value: horizon " + std::to_string(horizon) +
                     " does not match the solved stages");
  }
  if (b0.size() != model.num_states()) throw InputError("achieved_value: dimension mismatch");
  for (const AlphaSet& set : stages) {
    if (set.empty()) throw InputError("achieved_value: empty stage set");
    if (set[0].values.size() != model.num_states()) {
      throw InputError("achieved_value: policy and model disagree on the state count");
    }
  }
  const double branches = std::pow(static_cast<double>(model.num_observations()),
                                   static_cast<double>(horizon - 1));
  if (branches > branch_cap) {
    throw GuardError("achieved_value: " + std::to_string(branches) + " branches exceed cap");
  }
  return Walker{model, stages, schemes, mode}.value(b0, b0, horizon, true);
}

EvalReport average_error(const Pomdp& model, const std::vector<AlphaSet>& stages,
                         const SchemeAssignment& schemes, const EvalConfig& config,
                         std::string method, double search_seconds) {
  if (config.num_beliefs == 0) throw InputError("average_error: need at least one belief");
  if (stages.empty()) throw InputError("average_error: no solved stages");
  const auto start = std::chrono::steady_clock::now();
  const std::size_t horizon = stages.size();

  EvalReport report;
  report.method = std::move(method);
  report.mode = config.mode;
  report.num_beliefs = config.num_beliefs;
  report.seed = config.seed;
  report.horizon = horizon;
  report.num_variables = model.num_variables();
  report.num_actions = model.num_actions();
  report.num_observations = model.num_observations();
  report.bound_tests = config.bound_tests;
  report.seconds = search_seconds;

  Rng rng(config.seed);
  double sum = 0.0;
  for (std::size_t n = 0; n < config.num_beliefs; ++n) {
    const BeliefState b0 = random_belief(model.num_states(), rng);
    const double optimal = value_of(b0, stages.back()).value;
    const double achieved =
        achieved_value(model, stages, schemes, b0, config.mode, horizon, config.branch_cap);
    const double loss = std::max(0.0, optimal - achieved);
    sum += loss;
    report.max_loss = std::max(report.max_loss, loss);
  }
  report.average_loss = sum / static_cast<double>(config.num_beliefs);

  SwitchOptions tests;
  tests.method = config.bound_tests;
  report.bound_b = bound_B(stages.back(), switch_sets(stages.back(), schemes, tests));
  bool all_covered = true;
  for (const AlphaSet& set : stages) all_covered = all_covered && schemes.covers(set.stage);
  if (all_covered) {
    BoundsOptions bounds;
    bounds.switches = tests;
    bounds.alt = config.alt;
    report.bound_e = compute_bounds(model, stages, schemes, bounds).per_stage.back().e;
  }
  report.eval_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace beliefvs
