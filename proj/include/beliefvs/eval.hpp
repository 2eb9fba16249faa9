#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "beliefvs/alpha.hpp"
#include "beliefvs/bounds.hpp"
#include "beliefvs/model.hpp"
#include "beliefvs/projection.hpp"

namespace beliefvs {

// Single: project b0 once, then monitor exactly. Successive: project after
// every update.
enum class ApproxMode { Single, Successive };

const char* to_string(ApproxMode mode);
std::optional<ApproxMode> parse_approx_mode(std::string_view name);

struct EvalConfig {
  std::size_t num_beliefs = 5000;
  std::uint64_t seed = 0;
  ApproxMode mode = ApproxMode::Successive;
  // Switch tests used for the attached B/E values.
  SwitchMethod bound_tests = SwitchMethod::VS;
  AltOptions alt;
  // Limit on |Z|^K observation branches per initial belief.
  double branch_cap = 1e7;
};

// Expected K-step reward of the agent that decides on its approximate
// belief while the world follows the exact one. At every stage the region is
// the optimal vector at the unprojected approximate belief; that region's
// scheme projects it and the vector optimal at the projected belief is
// executed. Observations impossible under the approximate belief reset it to
// the exact posterior.
double achieved_value(const Pomdp& model, const std::vector<AlphaSet>& stages,
                      const SchemeAssignment& schemes, const BeliefState& b0, ApproxMode mode,
                      std::size_t horizon, double branch_cap = 1e7);

struct EvalReport {
  std::string method;  // search method, or "scheme" for a given scheme
  ApproxMode mode = ApproxMode::Successive;
  std::size_t num_beliefs = 0;
  std::uint64_t seed = 0;
  std::size_t horizon = 0;
  std::size_t num_variables = 0;
  std::size_t num_actions = 0;
  std::size_t num_observations = 0;
  SwitchMethod bound_tests = SwitchMethod::VS;
  double average_loss = 0.0;
  double max_loss = 0.0;
  double bound_b = 0.0;
  std::optional<double> bound_e;  // unset when the Alt sets hit their guard
  double seconds = 0.0;           // time spent choosing the scheme
  double eval_seconds = 0.0;
};

// Mean over random initial beliefs of max(0, V*(b0) - achieved_value), with
// the B/E bounds of the same schemes attached.
EvalReport average_error(const Pomdp& model, const std::vector<AlphaSet>& stages,
                         const SchemeAssignment& schemes, const EvalConfig& config,
                         std::string method = "scheme", double search_seconds = 0.0);

}  // namespace beliefvs
