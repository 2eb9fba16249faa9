#include "beliefvs/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <tuple>

#include "beliefvs/error.hpp"
#include "beliefvs/lp.hpp"
#include "beliefvs/random.hpp"

namespace beliefvs {

namespace {

std::size_t argmax_restricted(std::span<const double> belief, const AlphaSet& set,
                              std::size_t i, std::size_t j, bool pairwise) {
  if (!pairwise) return value_of(belief, set).index;
  const std::size_t lo = std::min(i, j);
  const std::size_t hi = std::max(i, j);
  return dot(belief, set[hi].values) > dot(belief, set[lo].values) ? hi : lo;
}

void check_pair(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InputError("switch test: dimension mismatch");
}

// Keeps the pointwise-minimal members (first of any duplicates).
void keep_minimal(std::vector<Vec>& members) {
  std::vector<Vec> kept;
  for (auto& c : members) {
    bool covered = false;
    for (const auto& k : kept) {
      if (pointwise_geq(c, k)) {
        covered = true;
        break;
      }
    }
    if (covered) continue;
    std::erase_if(kept, [&](const Vec& k) { return pointwise_geq(k, c); });
    kept.push_back(std::move(c));
  }
  members = std::move(kept);
}

void guard_size(double size, const AltOptions& options, std::size_t stage) {
  if (size > options.max_set_size) {
    throw GuardError("alt_sets: stage " + std::to_string(stage) + " needs " +
                     std::to_string(size) + " vectors (cap " +
                     std::to_string(options.max_set_size) + ")");
  }
}

}  // namespace

const char* to_string(SwitchMethod method) {
  switch (method) {
    case SwitchMethod::LP:
      return "lp";
    case SwitchMethod::VS:
      return "vs";
    case SwitchMethod::Oracle:
      return "oracle";
  }
  return "?";
}

GradientVector gradient(const AlphaSet& set, std::size_t i, std::size_t j) {
  return {i, j, subtract(set[i].values, set[j].values)};
}

SwitchDecision lp_switch_test(std::span<const double> alpha_i, std::span<const double> alpha_j,
                              const ConstraintFamily& family) {
  check_pair(alpha_i, alpha_j);
  const std::size_t states = alpha_i.size();
  if (states != (std::size_t{1} << family.num_variables)) {
    throw InputError("lp_switch_test: dimension mismatch");
  }
  // Layout: x | b(0..S-1) | b'(0..S-1)
  const std::size_t nv = 1 + 2 * states;
  LinearProgram lp(nv);
  lp.set_free(0);
  lp.objective[0] = 1.0;

  Vec favour_i(nv, 0.0);
  Vec favour_j(nv, 0.0);
  favour_i[0] = -1.0;
  favour_j[0] = -1.0;
  for (std::size_t s = 0; s < states; ++s) {
    const double diff = alpha_i[s] - alpha_j[s];
    favour_i[1 + s] = diff;
    favour_j[1 + states + s] = -diff;
  }
  lp.add(std::move(favour_i), Relation::GreaterEqual, 0.0);
  lp.add(std::move(favour_j), Relation::GreaterEqual, 0.0);
  for (VarMask m : family.subsets) {
    Vec row(nv, 0.0);
    for (std::size_t s = 0; s < states; ++s) {
      if ((s & m) != m) continue;
      row[1 + s] = -1.0;
      row[1 + states + s] = 1.0;
    }
    lp.add(std::move(row), Relation::Equal, 0.0);
  }
  Vec simplex(nv, 0.0);
  for (std::size_t s = 0; s < states; ++s) simplex[1 + s] = 1.0;
  lp.add(std::move(simplex), Relation::Equal, 1.0);

  const LpResult r = solve_lp(lp);
  if (r.status != LpStatus::Optimal) {
    throw NumericalError("lp_switch_test: LP did not reach an optimum");
  }
  SwitchDecision d;
  d.method = SwitchMethod::LP;
  d.objective = r.value;
  d.switches = r.value > kSwitchThreshold;
  if (d.switches) {
    d.witness.emplace(Vec(r.point.begin() + 1, r.point.begin() + 1 + static_cast<long>(states)),
                      Vec(r.point.begin() + 1 + static_cast<long>(states), r.point.end()));
  }
  return d;
}

SwitchDecision lp_switch_test(std::span<const double> alpha_i, std::span<const double> alpha_j,
                              const ProjectionScheme& scheme) {
  return lp_switch_test(alpha_i, alpha_j, constraint_family(scheme));
}

SwitchDecision vs_switch_test(std::span<const double> alpha_i, std::span<const double> alpha_j,
                              const WalshBasis& basis) {
  check_pair(alpha_i, alpha_j);
  const Vec diff = subtract(alpha_i, alpha_j);
  const double residual = residual_sq_length(diff, basis);
  const double eps = kSwitchThreshold * std::sqrt(dot(diff, diff));
  SwitchDecision d;
  d.method = SwitchMethod::VS;
  d.objective = residual;
  d.switches = residual > eps * eps;
  return d;
}

SwitchDecision oracle_switch_test(std::size_t i, std::size_t j, const AlphaSet& set,
                                  const ProjectionScheme& scheme, const OracleOptions& options) {
  if (options.samples == 0) throw InputError("oracle_switch_test: need at least one sample");
  SwitchDecision d;
  d.method = SwitchMethod::Oracle;
  if (i == j) return d;
  const std::size_t states = set[i].values.size();
  Rng rng(options.seed);
  for (std::size_t n = 0; n < options.samples; ++n) {
    const BeliefState b = random_belief(states, rng);
    if (argmax_restricted(b.probs(), set, i, j, options.pairwise) != i) continue;
    Vec approx = project(b.probs(), scheme);
    if (argmax_restricted(approx, set, i, j, options.pairwise) != j) continue;
    const Vec diff = subtract(set[i].values, set[j].values);
    d.switches = true;
    d.objective = dot(b.probs(), diff) - dot(approx, diff);
    d.witness.emplace(b.vec(), std::move(approx));
    return d;
  }
  return d;
}

std::vector<std::size_t> switch_set(std::size_t i, const AlphaSet& set,
                                    const ProjectionScheme& scheme, const SwitchOptions& options) {
  if (i >= set.size()) throw InputError("switch_set: vector index out of range");
  std::vector<std::size_t> out;
  if (options.method == SwitchMethod::Oracle) {
    const SwitchSets all = switch_sets(set, scheme, options);
    return all[i];
  }
  const WalshBasis basis =
      options.method == SwitchMethod::VS ? build_basis(scheme) : WalshBasis{};
  const ConstraintFamily family = constraint_family(scheme);
  for (std::size_t j = 0; j < set.size(); ++j) {
    if (j == i) continue;
    const bool positive = options.method == SwitchMethod::VS
                              ? vs_switch_test(set[i].values, set[j].values, basis).switches
                              : lp_switch_test(set[i].values, set[j].values, family).switches;
    if (positive) out.push_back(j);
  }
  return out;
}

SwitchSets switch_sets(const AlphaSet& set, const ProjectionScheme& scheme,
                       const SwitchOptions& options) {
  return switch_sets(set, SchemeAssignment(scheme), options);
}

SwitchSets switch_sets(const AlphaSet& set, const SchemeAssignment& assignment,
                       const SwitchOptions& options) {
  SwitchSets out(set.size());
  if (set.empty()) return out;

  if (options.method == SwitchMethod::Oracle) {
    // One sampling pass serves every vector: the true-set variant.
    const std::size_t states = set[0].values.size();
    Rng rng(options.oracle.seed ^ (0x9e3779b97f4a7c15ULL * (set.stage + 1)));
    std::vector<std::vector<bool>> hit(set.size(), std::vector<bool>(set.size(), false));
    for (std::size_t n = 0; n < options.oracle.samples; ++n) {
      const BeliefState b = random_belief(states, rng);
      const std::size_t i = value_of(b.probs(), set).index;
      const Vec approx = project(b.probs(), assignment.scheme_for(set.stage, i));
      const std::size_t j = value_of(approx, set).index;
      if (j != i) hit[i][j] = true;
    }
    for (std::size_t i = 0; i < set.size(); ++i) {
      for (std::size_t j = 0; j < set.size(); ++j) {
        if (hit[i][j]) out[i].push_back(j);
      }
    }
    return out;
  }

  std::map<ProjectionScheme, WalshBasis> bases;
  std::map<ProjectionScheme, ConstraintFamily> families;
  for (std::size_t i = 0; i < set.size(); ++i) {
    const ProjectionScheme& scheme = assignment.scheme_for(set.stage, i);
    for (std::size_t j = 0; j < set.size(); ++j) {
      if (j == i) continue;
      bool positive = false;
      if (options.method == SwitchMethod::VS) {
        auto it = bases.find(scheme);
        if (it == bases.end()) it = bases.emplace(scheme, build_basis(scheme)).first;
        positive = vs_switch_test(set[i].values, set[j].values, it->second).switches;
      } else {
        auto it = families.find(scheme);
        if (it == families.end()) it = families.emplace(scheme, constraint_family(scheme)).first;
        positive = lp_switch_test(set[i].values, set[j].values, it->second).switches;
      }
      if (positive) out[i].push_back(j);
    }
  }
  return out;
}

double bound_B(const AlphaSet& set, const SwitchSets& sets) {
  double bound = 0.0;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    for (std::size_t j : sets[i]) {
      bound = std::max(bound, max_component(subtract(set[i].values, set[j].values)));
    }
  }
  return bound;
}

AltSets alt_sets(const Pomdp& model, const std::vector<AlphaSet>& stages,
                 const std::vector<SwitchSets>& switch_sets_per_stage, const AltOptions& options) {
  if (switch_sets_per_stage.size() != stages.size()) {
    throw InputError("alt_sets: one switch-set family per stage required");
  }
  AltSets alt(stages.size());
  if (stages.empty()) return alt;
  const std::size_t states = model.num_states();
  const std::size_t nz = model.num_observations();

  const AlphaSet& first = stages[0];
  for (std::size_t i = 0; i < first.size(); ++i) {
    std::vector<Vec> members{first[i].values};
    for (std::size_t j : switch_sets_per_stage[0][i]) members.push_back(first[j].values);
    keep_minimal(members);
    alt[0].push_back(std::move(members));
  }

  for (std::size_t k = 1; k < stages.size(); ++k) {
    const AlphaSet& set = stages[k];
    const auto& prev_alt = alt[k - 1];
    // successor[(a, z, j)] = G_{a,z} applied to every member of Alt^{k-1}(j)
    std::map<std::tuple<std::size_t, std::size_t, std::size_t>, std::vector<Vec>> successor;
    auto successors = [&](std::size_t a, std::size_t z, std::size_t j) -> const std::vector<Vec>& {
      auto key = std::make_tuple(a, z, j);
      auto it = successor.find(key);
      if (it != successor.end()) return it->second;
      const Table& t = model.transition[a];
      const Table& o = model.observation[a];
      std::vector<Vec> out;
      Vec weighted(states);
      for (const Vec& v : prev_alt.at(j)) {
        for (std::size_t sp = 0; sp < states; ++sp) weighted[sp] = o(sp, z) * v[sp];
        Vec g(states);
        for (std::size_t s = 0; s < states; ++s) g[s] = dot(t.row(s), weighted);
        out.push_back(std::move(g));
      }
      return successor.emplace(key, std::move(out)).first->second;
    };

    for (std::size_t i = 0; i < set.size(); ++i) {
      std::vector<std::size_t> roots{i};
      for (std::size_t j : switch_sets_per_stage[k][i]) roots.push_back(j);
      std::vector<Vec> members;
      for (std::size_t r : roots) {
        const AlphaVector& root = set[r];
        if (root.strategy.size() != nz) throw InputError("alt_sets: plan annotation missing");
        std::vector<Vec> partial{Vec(states, 0.0)};
        for (std::size_t z = 0; z < nz; ++z) {
          const auto& g = successors(root.action, z, root.strategy[z]);
          guard_size(static_cast<double>(partial.size()) * static_cast<double>(g.size()), options,
                     k + 1);
          std::vector<Vec> next;
          next.reserve(partial.size() * g.size());
          for (const Vec& p : partial) {
            for (const Vec& v : g) {
              Vec sum(states);
              for (std::size_t s = 0; s < states; ++s) sum[s] = p[s] + v[s];
              next.push_back(std::move(sum));
            }
          }
          keep_minimal(next);
          partial = std::move(next);
        }
        for (Vec& p : partial) {
          for (std::size_t s = 0; s < states; ++s) p[s] = model.reward[s] + model.discount * p[s];
          members.push_back(std::move(p));
        }
        guard_size(static_cast<double>(members.size()), options, k + 1);
      }
      keep_minimal(members);
      alt[k].push_back(std::move(members));
    }
  }
  return alt;
}

std::vector<double> bound_E(const std::vector<AlphaSet>& stages, const AltSets& alt) {
  std::vector<double> e(stages.size(), 0.0);
  for (std::size_t k = 0; k < stages.size(); ++k) {
    for (std::size_t i = 0; i < stages[k].size(); ++i) {
      for (const Vec& member : alt.at(k).at(i)) {
        e[k] = std::max(e[k], max_component(subtract(stages[k][i].values, member)));
      }
    }
  }
  return e;
}

double BoundsReport::max_b() const {
  double best = 0.0;
  for (const auto& s : per_stage) best = std::max(best, s.b);
  return best;
}

std::optional<double> BoundsReport::max_e() const {
  double best = 0.0;
  for (const auto& s : per_stage) {
    if (!s.e) return std::nullopt;
    best = std::max(best, *s.e);
  }
  return best;
}

BoundsReport compute_bounds(const Pomdp& model, const std::vector<AlphaSet>& stages,
                            const SchemeAssignment& scheme, const BoundsOptions& options) {
  BoundsReport report;
  report.scheme = scheme;
  report.method = options.switches.method;
  std::vector<SwitchSets> all_sets;
  for (const AlphaSet& set : stages) {
    StageBounds sb;
    sb.stage = set.stage;
    sb.switch_sets = switch_sets(set, scheme, options.switches);
    sb.b = bound_B(set, sb.switch_sets);
    all_sets.push_back(sb.switch_sets);
    report.per_stage.push_back(std::move(sb));
  }
  if (!options.compute_e) return report;
  try {
    const AltSets alt = alt_sets(model, stages, all_sets, options.alt);
    const std::vector<double> e = bound_E(stages, alt);
    for (std::size_t k = 0; k < stages.size(); ++k) {
      report.per_stage[k].e = e[k];
      for (const auto& members : alt[k]) report.per_stage[k].alt_set_sizes.push_back(members.size());
    }
  } catch (const GuardError&) {
    if (!options.tolerate_alt_guard) throw;
  }
  return report;
}

}  // namespace beliefvs
