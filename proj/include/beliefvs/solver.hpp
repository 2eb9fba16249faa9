#pragma once

#include <cstddef>
#include <vector>

#include "beliefvs/alpha.hpp"
#include "beliefvs/model.hpp"

namespace beliefvs {

struct SolverOptions {
  // Maximum |A| * |prev|^|Z| vectors a single backup may enumerate.
  double enumeration_cap = 1e6;
  // Witness margin below which a vector is considered dominated.
  double prune_tolerance = 1e-9;
};

// The stage-0 set: a single zero vector, so a k-stage plan accrues exactly k
// rewards.
AlphaSet base_set(const Pomdp& model);

// Monahan enumeration: one vector per (action, observation strategy) pair,
//   values(s) = R(s) + gamma sum_s' P(s'|s,a) sum_z P(z|s',a) prev[sigma(z)](s').
// Throws GuardError when the enumeration would exceed the cap.
AlphaSet backup(const Pomdp& model, const AlphaSet& prev, const SolverOptions& options = {});

// Parsimonious subset: pointwise-dominated vectors go first, then witness-LP
// filtering. The first of several exact duplicates is kept and the result is
// in original order.
AlphaSet prune(const AlphaSet& set, double tolerance = 1e-9);

// Backup/prune from the stage-0 set; element k-1 of the result is stage k.
std::vector<AlphaSet> solve(const Pomdp& model, std::size_t horizon,
                            const SolverOptions& options = {});

// Exact expectimax over the belief MDP, used as a test oracle. Throws
// GuardError when (|A| |Z|)^k exceeds `branch_cap`.
double brute_force_value(const Pomdp& model, const BeliefState& b, std::size_t k,
                         double branch_cap = 1e7);

}  // namespace beliefvs
