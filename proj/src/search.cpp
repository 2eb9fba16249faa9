#include "beliefvs/search.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>

#include "beliefvs/error.hpp"

namespace beliefvs {

namespace {

double elapsed_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::vector<Vec> gradients_of(std::size_t i, const AlphaSet& set) {
  std::vector<Vec> out;
  for (std::size_t j = 0; j < set.size(); ++j) {
    if (j != i) out.push_back(subtract(set[i].values, set[j].values));
  }
  return out;
}

// Every gradient already lies in the span of the basis: no projection error
// is possible at this node.
bool all_negligible(std::span<const double> per_j, const std::vector<Vec>& gradients) {
  for (std::size_t j = 0; j < per_j.size(); ++j) {
    const double eps = kSwitchThreshold * std::sqrt(dot(gradients[j], gradients[j]));
    if (per_j[j] > eps * eps) return false;
  }
  return true;
}

std::size_t num_variables_of(const std::vector<AlphaSet>& stages) {
  for (const auto& set : stages) {
    if (!set.empty()) {
      const std::size_t states = set[0].values.size();
      std::size_t n = 0;
      while ((std::size_t{1} << n) < states) ++n;
      if ((std::size_t{1} << n) != states) throw InputError("search: vector length is not 2^n");
      return n;
    }
  }
  throw InputError("search: no alpha vectors");
}

std::vector<std::size_t> stages_in_scope(const std::vector<AlphaSet>& stages, StageScope scope) {
  std::vector<std::size_t> out;
  if (stages.empty()) return out;
  if (scope == StageScope::Last) {
    out.push_back(stages.size() - 1);
  } else {
    for (std::size_t k = 0; k < stages.size(); ++k) out.push_back(k);
  }
  return out;
}

}  // namespace

const char* to_string(SearchMethod method) {
  switch (method) {
    case SearchMethod::BLp:
      return "b-lp";
    case SearchMethod::BVs:
      return "b-vs";
    case SearchMethod::ELp:
      return "e-lp";
    case SearchMethod::EVs:
      return "e-vs";
    case SearchMethod::VsSum:
      return "vs-sum";
    case SearchMethod::VsMax:
      return "vs-max";
  }
  return "?";
}

const char* to_string(StageScope scope) { return scope == StageScope::Last ? "last" : "all"; }

std::optional<SearchMethod> parse_search_method(std::string_view name) {
  for (auto m : {SearchMethod::BLp, SearchMethod::BVs, SearchMethod::ELp, SearchMethod::EVs,
                 SearchMethod::VsSum, SearchMethod::VsMax}) {
    if (name == to_string(m)) return m;
  }
  return std::nullopt;
}

std::optional<StageScope> parse_stage_scope(std::string_view name) {
  if (name == "last") return StageScope::Last;
  if (name == "all") return StageScope::All;
  return std::nullopt;
}

std::vector<double> pairwise_residuals(std::size_t i, const AlphaSet& set, const WalshBasis& basis) {
  std::vector<double> out;
  for (std::size_t j = 0; j < set.size(); ++j) {
    if (j == i) continue;
    out.push_back(residual_sq_length(subtract(set[i].values, set[j].values), basis));
  }
  return out;
}

double aggregate(Estimator estimator, std::span<const double> per_j) {
  double out = 0.0;
  for (double v : per_j) out = estimator == Estimator::Sum ? out + v : std::max(out, v);
  return out;
}

double estimator_sum(std::size_t i, const AlphaSet& set, const WalshBasis& basis) {
  return aggregate(Estimator::Sum, pairwise_residuals(i, set, basis));
}

double estimator_max(std::size_t i, const AlphaSet& set, const WalshBasis& basis) {
  return aggregate(Estimator::Max, pairwise_residuals(i, set, basis));
}

std::vector<double> incremental_scores(std::span<const double> previous, VarMask marginal,
                                       const std::vector<Vec>& gradients,
                                       std::size_t num_variables) {
  if (previous.size() != gradients.size()) {
    throw InputError("incremental_scores: one score per gradient required");
  }
  const Vec v = walsh_vector(marginal, num_variables);
  std::vector<double> out(previous.size());
  for (std::size_t j = 0; j < previous.size(); ++j) {
    const double c = dot(v, gradients[j]);
    out[j] = std::max(0.0, previous[j] - c * c);
  }
  return out;
}

SearchResult vs_search(const std::vector<AlphaSet>& stages, Estimator estimator, StageScope scope) {
  const auto start = std::chrono::steady_clock::now();
  const std::size_t n = num_variables_of(stages);
  const ProjectionScheme root = lattice_root(n);
  const WalshBasis root_basis = build_basis(root);

  SearchResult result;
  result.method = estimator == Estimator::Sum ? SearchMethod::VsSum : SearchMethod::VsMax;
  result.scope = scope;
  std::map<std::size_t, std::vector<ProjectionScheme>> regions;
  for (std::size_t k : stages_in_scope(stages, scope)) {
    const AlphaSet& set = stages[k];
    std::vector<ProjectionScheme>& chosen = regions[set.stage];
    for (std::size_t i = 0; i < set.size(); ++i) {
      const std::vector<Vec> gradients = gradients_of(i, set);
      std::vector<double> per_j = pairwise_residuals(i, set, root_basis);
      ProjectionScheme node = root;
      SearchTrace trace{set.stage, i, {{0, aggregate(estimator, per_j)}}};
      for (;;) {
        if (all_negligible(per_j, gradients)) break;
        const auto children = lattice_children(node);
        if (children.empty()) break;
        std::size_t best = 0;
        std::vector<double> best_scores;
        double best_score = 0.0;
        for (std::size_t c = 0; c < children.size(); ++c) {
          auto scores = incremental_scores(per_j, children[c].marginal, gradients, n);
          const double score = aggregate(estimator, scores);
          if (c == 0 || score < best_score) {
            best = c;
            best_score = score;
            best_scores = std::move(scores);
          }
        }
        node = children[best].child;
        per_j = std::move(best_scores);
        trace.steps.push_back({children[best].marginal, best_score});
      }
      chosen.push_back(node);
      result.traces.push_back(std::move(trace));
    }
  }
  result.schemes = SchemeAssignment(std::move(regions));
  result.seconds = elapsed_since(start);
  return result;
}

SearchResult greedy_bound_search(const Pomdp& model, const std::vector<AlphaSet>& stages,
                                 BoundKind kind, SwitchMethod tests, StageScope scope,
                                 const AltOptions& alt) {
  if (tests == SwitchMethod::Oracle) {
    throw InputError("greedy_bound_search: switch tests must be LP or VS");
  }
  const auto start = std::chrono::steady_clock::now();
  const std::size_t n = num_variables_of(stages);

  BoundsOptions options;
  options.switches.method = tests;
  options.compute_e = kind == BoundKind::E;
  options.alt = alt;
  options.tolerate_alt_guard = false;

  auto evaluate = [&](const ProjectionScheme& scheme) {
    const SchemeAssignment assignment(scheme);
    if (kind == BoundKind::B && scope == StageScope::Last) {
      const AlphaSet& last = stages.back();
      return bound_B(last, switch_sets(last, assignment, options.switches));
    }
    const BoundsReport report = compute_bounds(model, stages, assignment, options);
    if (scope == StageScope::Last) {
      const StageBounds& last = report.per_stage.back();
      return kind == BoundKind::B ? last.b : *last.e;
    }
    return kind == BoundKind::B ? report.max_b() : *report.max_e();
  };

  SearchResult result;
  if (kind == BoundKind::B) {
    result.method = tests == SwitchMethod::LP ? SearchMethod::BLp : SearchMethod::BVs;
  } else {
    result.method = tests == SwitchMethod::LP ? SearchMethod::ELp : SearchMethod::EVs;
  }
  result.scope = scope;

  ProjectionScheme node = lattice_root(n);
  double score = evaluate(node);
  SearchTrace trace{std::nullopt, std::nullopt, {{0, score}}};
  while (score > 0.0) {
    const auto children = lattice_children(node);
    if (children.empty()) break;
    std::size_t best = 0;
    double best_score = 0.0;
    for (std::size_t c = 0; c < children.size(); ++c) {
      const double s = evaluate(children[c].child);
      if (c == 0 || s < best_score) {
        best = c;
        best_score = s;
      }
    }
    node = children[best].child;
    score = best_score;
    trace.steps.push_back({children[best].marginal, score});
  }
  result.traces.push_back(std::move(trace));
  result.schemes = SchemeAssignment(node);
  result.seconds = elapsed_since(start);
  return result;
}

SearchResult run_search(const Pomdp& model, const std::vector<AlphaSet>& stages,
                        const SearchConfig& config) {
  switch (config.method) {
    case SearchMethod::BLp:
      return greedy_bound_search(model, stages, BoundKind::B, SwitchMethod::LP, config.scope,
                                 config.alt);
    case SearchMethod::BVs:
      return greedy_bound_search(model, stages, BoundKind::B, SwitchMethod::VS, config.scope,
                                 config.alt);
    case SearchMethod::ELp:
      return greedy_bound_search(model, stages, BoundKind::E, SwitchMethod::LP, config.scope,
                                 config.alt);
    case SearchMethod::EVs:
      return greedy_bound_search(model, stages, BoundKind::E, SwitchMethod::VS, config.scope,
                                 config.alt);
    case SearchMethod::VsSum:
      return vs_search(stages, Estimator::Sum, config.scope);
    case SearchMethod::VsMax:
      return vs_search(stages, Estimator::Max, config.scope);
  }
  throw InputError("run_search: unknown method");
}

}  // namespace beliefvs
