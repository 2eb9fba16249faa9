#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "beliefvs/linalg.hpp"
#include "beliefvs/model.hpp"

namespace beliefvs {

// Set of variable indices; bit i stands for variable i.
using VarMask = std::uint32_t;

inline VarMask var_bit(std::size_t i) { return VarMask{1} << i; }

// A partition of the n variables into disjoint, non-empty blocks. Blocks are
// kept sorted by their lowest variable so equal partitions compare equal.
class ProjectionScheme {
 public:
  ProjectionScheme() = default;
  // Throws InputError unless `blocks` partition {0..n-1}.
  ProjectionScheme(std::size_t num_variables, std::vector<VarMask> blocks);

  static ProjectionScheme singletons(std::size_t num_variables);
  // One block holding every variable: projection is the identity.
  static ProjectionScheme identity(std::size_t num_variables);

  std::size_t num_variables() const { return num_variables_; }
  const std::vector<VarMask>& blocks() const { return blocks_; }
  std::size_t max_block_size() const;

  bool operator==(const ProjectionScheme&) const = default;
  bool operator<(const ProjectionScheme& other) const { return blocks_ < other.blocks_; }

 private:
  std::size_t num_variables_ = 0;
  std::vector<VarMask> blocks_;
};

// Every subset m' of some block (including the empty set), ordered by mask.
// Projection preserves exactly these marginals; count() is the number of
// independent constraints c.
struct ConstraintFamily {
  std::size_t num_variables = 0;
  std::vector<VarMask> subsets;

  std::size_t count() const { return subsets.size(); }
};

ConstraintFamily constraint_family(const ProjectionScheme& scheme);
// Downward closure of an arbitrary cover; blocks may overlap here.
ConstraintFamily constraint_family(std::size_t num_variables, std::span<const VarMask> cover);

// Probability that every variable in `subset` is true; 1 for the empty set.
double marginal_true(std::span<const double> belief, VarMask subset);

// Product of the block marginals of `belief`.
Vec project(std::span<const double> belief, const ProjectionScheme& scheme);
BeliefState project(const BeliefState& b, const ProjectionScheme& scheme);

// project(b, S) - b.
Vec displacement(const BeliefState& b, const ProjectionScheme& scheme);

// Boolean constraint vector: 1 at states where every variable of m is true.
Vec indicator_vector(VarMask m, std::size_t num_variables);

// Character vector: +2^{-n/2} where an even number of m's variables are true,
// -2^{-n/2} otherwise.
Vec walsh_vector(VarMask m, std::size_t num_variables);

// Orthonormal basis of the span of the constraint vectors, one character per
// family member, ordered by mask.
struct WalshBasis {
  std::size_t num_variables = 0;
  std::vector<VarMask> subsets;
  std::vector<Vec> vectors;

  std::size_t size() const { return vectors.size(); }
};

WalshBasis build_basis(const ConstraintFamily& family);
WalshBasis build_basis(const ProjectionScheme& scheme);

// Squared length of the component of w that the basis does not span:
// w.w - sum_v (w.v)^2, clamped at 0.
double residual_sq_length(std::span<const double> w, const WalshBasis& basis);

// The search lattice: partitions whose blocks hold at most two variables.
ProjectionScheme lattice_root(std::size_t num_variables);

struct LatticeEdge {
  ProjectionScheme child;
  VarMask marginal = 0;  // the pair merged along this edge
};

// Merges of two singleton blocks, ordered by the merged pair (lowest first).
std::vector<LatticeEdge> lattice_children(const ProjectionScheme& scheme);

// Which scheme projects a belief that lies in the optimal region of vector
// `region` of stage `stage`. Either one global scheme or per-stage,
// per-region maps.
class SchemeAssignment {
 public:
  SchemeAssignment() = default;
  explicit SchemeAssignment(ProjectionScheme global) : global_(std::move(global)), is_global_(true) {}
  explicit SchemeAssignment(std::map<std::size_t, std::vector<ProjectionScheme>> per_region)
      : per_region_(std::move(per_region)) {}

  bool is_global() const { return is_global_; }
  const ProjectionScheme& global() const { return global_; }
  const std::map<std::size_t, std::vector<ProjectionScheme>>& per_region() const {
    return per_region_;
  }

  bool covers(std::size_t stage) const { return is_global_ || per_region_.count(stage) > 0; }

  // Throws InputError when the stage or region is not covered.
  const ProjectionScheme& scheme_for(std::size_t stage, std::size_t region) const;

 private:
  ProjectionScheme global_;
  bool is_global_ = false;
  std::map<std::size_t, std::vector<ProjectionScheme>> per_region_;
};

}  // namespace beliefvs
