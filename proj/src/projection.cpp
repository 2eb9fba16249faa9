#include "beliefvs/projection.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <set>
#include <string>

#include "beliefvs/error.hpp"

namespace beliefvs {

namespace {

VarMask all_variables(std::size_t n) {
  return n >= 32 ? ~VarMask{0} : static_cast<VarMask>((VarMask{1} << n) - 1);
}

// Packs the bits of `state` selected by `mask` into the low bits.
std::size_t compress(std::size_t state, VarMask mask) {
  std::size_t out = 0;
  std::size_t k = 0;
  while (mask != 0) {
    const int bit = std::countr_zero(mask);
    if ((state >> bit) & 1U) out |= std::size_t{1} << k;
    ++k;
    mask &= mask - 1;
  }
  return out;
}

void check_dimension(std::size_t size, std::size_t num_variables, const char* where) {
  if (size != (std::size_t{1} << num_variables)) {
    throw InputError(std::string(where) + ": dimension mismatch");
  }
}

}  // namespace

ProjectionScheme::ProjectionScheme(std::size_t num_variables, std::vector<VarMask> blocks)
    : num_variables_(num_variables), blocks_(std::move(blocks)) {
  if (num_variables == 0 || num_variables > kMaxVariables) {
    throw InputError("scheme: unsupported variable count");
  }
  VarMask seen = 0;
  for (VarMask b : blocks_) {
    if (b == 0) throw InputError("scheme: empty block");
    if ((b & seen) != 0) throw InputError("scheme: blocks overlap");
    if ((b & ~all_variables(num_variables)) != 0) throw InputError("scheme: unknown variable");
    seen |= b;
  }
  if (seen != all_variables(num_variables)) {
    throw InputError("scheme: blocks do not cover every variable");
  }
  std::sort(blocks_.begin(), blocks_.end(), [](VarMask a, VarMask b) {
    return std::countr_zero(a) < std::countr_zero(b);
  });
}

ProjectionScheme ProjectionScheme::singletons(std::size_t num_variables) {
  std::vector<VarMask> blocks;
  for (std::size_t i = 0; i < num_variables; ++i) blocks.push_back(var_bit(i));
  return ProjectionScheme(num_variables, std::move(blocks));
}

ProjectionScheme ProjectionScheme::identity(std::size_t num_variables) {
  return ProjectionScheme(num_variables, {all_variables(num_variables)});
}

std::size_t ProjectionScheme::max_block_size() const {
  std::size_t best = 0;
  for (VarMask b : blocks_) best = std::max<std::size_t>(best, std::popcount(b));
  return best;
}

ConstraintFamily constraint_family(std::size_t num_variables, std::span<const VarMask> cover) {
  std::set<VarMask> subsets{0};
  for (VarMask block : cover) {
    for (VarMask sub = block; sub != 0; sub = (sub - 1) & block) subsets.insert(sub);
  }
  return {num_variables, std::vector<VarMask>(subsets.begin(), subsets.end())};
}

ConstraintFamily constraint_family(const ProjectionScheme& scheme) {
  return constraint_family(scheme.num_variables(), scheme.blocks());
}

double marginal_true(std::span<const double> belief, VarMask subset) {
  double sum = 0.0;
  for (std::size_t s = 0; s < belief.size(); ++s) {
    if ((s & subset) == subset) sum += belief[s];
  }
  return sum;
}

Vec project(std::span<const double> belief, const ProjectionScheme& scheme) {
  check_dimension(belief.size(), scheme.num_variables(), "project");
  const auto& blocks = scheme.blocks();
  std::vector<Vec> marginals;
  marginals.reserve(blocks.size());
  for (VarMask block : blocks) {
    Vec m(std::size_t{1} << std::popcount(block), 0.0);
    for (std::size_t s = 0; s < belief.size(); ++s) m[compress(s, block)] += belief[s];
    marginals.push_back(std::move(m));
  }
  Vec out(belief.size(), 1.0);
  for (std::size_t s = 0; s < belief.size(); ++s) {
    for (std::size_t k = 0; k < blocks.size(); ++k) out[s] *= marginals[k][compress(s, blocks[k])];
  }
  return out;
}

BeliefState project(const BeliefState& b, const ProjectionScheme& scheme) {
  return BeliefState(project(b.probs(), scheme));
}

Vec displacement(const BeliefState& b, const ProjectionScheme& scheme) {
  Vec d = project(b.probs(), scheme);
  for (std::size_t s = 0; s < d.size(); ++s) d[s] -= b[s];
  return d;
}

Vec indicator_vector(VarMask m, std::size_t num_variables) {
  Vec v(std::size_t{1} << num_variables, 0.0);
  for (std::size_t s = 0; s < v.size(); ++s) v[s] = (s & m) == m ? 1.0 : 0.0;
  return v;
}

Vec walsh_vector(VarMask m, std::size_t num_variables) {
  const std::size_t states = std::size_t{1} << num_variables;
  const double scale = 1.0 / std::sqrt(static_cast<double>(states));
  Vec v(states);
  for (std::size_t s = 0; s < states; ++s) {
    v[s] = std::popcount(static_cast<VarMask>(s) & m) % 2 == 0 ? scale : -scale;
  }
  return v;
}

WalshBasis build_basis(const ConstraintFamily& family) {
  WalshBasis basis;
  basis.num_variables = family.num_variables;
  basis.subsets = family.subsets;
  basis.vectors.reserve(family.subsets.size());
  for (VarMask m : family.subsets) basis.vectors.push_back(walsh_vector(m, family.num_variables));
  return basis;
}

WalshBasis build_basis(const ProjectionScheme& scheme) {
  return build_basis(constraint_family(scheme));
}

double residual_sq_length(std::span<const double> w, const WalshBasis& basis) {
  check_dimension(w.size(), basis.num_variables, "residual_sq_length");
  double r = dot(w, w);
  for (const Vec& v : basis.vectors) {
    const double c = dot(w, v);
    r -= c * c;
  }
  return std::max(r, 0.0);
}

ProjectionScheme lattice_root(std::size_t num_variables) {
  return ProjectionScheme::singletons(num_variables);
}

std::vector<LatticeEdge> lattice_children(const ProjectionScheme& scheme) {
  std::vector<VarMask> singles;
  std::vector<VarMask> others;
  for (VarMask b : scheme.blocks()) (std::popcount(b) == 1 ? singles : others).push_back(b);
  std::vector<LatticeEdge> edges;
  for (std::size_t i = 0; i < singles.size(); ++i) {
    for (std::size_t j = i + 1; j < singles.size(); ++j) {
      std::vector<VarMask> blocks = others;
      for (std::size_t k = 0; k < singles.size(); ++k) {
        if (k != i && k != j) blocks.push_back(singles[k]);
      }
      const VarMask merged = singles[i] | singles[j];
      blocks.push_back(merged);
      edges.push_back({ProjectionScheme(scheme.num_variables(), std::move(blocks)), merged});
    }
  }
  return edges;
}

const ProjectionScheme& SchemeAssignment::scheme_for(std::size_t stage, std::size_t region) const {
  if (is_global_) return global_;
  auto it = per_region_.find(stage);
  if (it == per_region_.end()) {
    throw InputError("scheme map has no entry for stage " + std::to_string(stage));
  }
  if (region >= it->second.size()) {
    throw InputError("scheme map for stage " + std::to_string(stage) + " lacks region " +
                     std::to_string(region));
  }
  return it->second[region];
}

}  // namespace beliefvs
