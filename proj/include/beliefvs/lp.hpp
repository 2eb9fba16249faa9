#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "beliefvs/linalg.hpp"

namespace beliefvs {

enum class Relation { LessEqual, Equal, GreaterEqual };

struct Constraint {
  Vec coeffs;
  Relation relation = Relation::LessEqual;
  double rhs = 0.0;
};

// maximize objective . x subject to the constraints and per-variable bounds.
// Variables default to [0, +inf).
struct LinearProgram {
  static constexpr double kInf = std::numeric_limits<double>::infinity();

  explicit LinearProgram(std::size_t num_vars)
      : objective(num_vars, 0.0), lower(num_vars, 0.0), upper(num_vars, kInf) {}

  std::size_t num_vars() const { return objective.size(); }

  void add(Vec coeffs, Relation relation, double rhs) {
    constraints.push_back({std::move(coeffs), relation, rhs});
  }
  void set_free(std::size_t j) {
    lower[j] = -kInf;
    upper[j] = kInf;
  }

  Vec objective;
  std::vector<Constraint> constraints;
  Vec lower;
  Vec upper;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  Vec point;  // filled when Optimal
  double value = 0.0;
};

inline constexpr double kLpFeasibilityTol = 1e-9;

// Two-phase dense tableau simplex with Bland's rule. Deterministic and
// reentrant. Throws NumericalError on non-finite data or when the pivot
// budget runs out, never reporting such cases as Infeasible.
LpResult solve_lp(const LinearProgram& lp);

}  // namespace beliefvs
