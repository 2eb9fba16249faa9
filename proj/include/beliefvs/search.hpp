#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "beliefvs/alpha.hpp"
#include "beliefvs/bounds.hpp"
#include "beliefvs/model.hpp"
#include "beliefvs/projection.hpp"

namespace beliefvs {

enum class SearchMethod { BLp, BVs, ELp, EVs, VsSum, VsMax };
enum class StageScope { Last, All };
enum class Estimator { Sum, Max };
enum class BoundKind { B, E };

const char* to_string(SearchMethod method);
const char* to_string(StageScope scope);
std::optional<SearchMethod> parse_search_method(std::string_view name);
std::optional<StageScope> parse_stage_scope(std::string_view name);

struct SearchConfig {
  SearchMethod method = SearchMethod::VsSum;
  StageScope scope = StageScope::All;
  std::uint64_t seed = 0;
  AltOptions alt;
};

struct TraceStep {
  VarMask merged = 0;  // 0 for the starting node
  double score = 0.0;
};

// One greedy descent. Bound searches leave stage/region unset.
struct SearchTrace {
  std::optional<std::size_t> stage;
  std::optional<std::size_t> region;
  std::vector<TraceStep> steps;
};

struct SearchResult {
  SearchMethod method = SearchMethod::VsSum;
  StageScope scope = StageScope::All;
  SchemeAssignment schemes;  // global for bound searches, per-region for VS
  std::vector<SearchTrace> traces;
  double seconds = 0.0;
};

// Squared residual lengths of alpha_i - alpha_j for every j != i, in j order.
std::vector<double> pairwise_residuals(std::size_t i, const AlphaSet& set, const WalshBasis& basis);

double estimator_sum(std::size_t i, const AlphaSet& set, const WalshBasis& basis);
double estimator_max(std::size_t i, const AlphaSet& set, const WalshBasis& basis);
double aggregate(Estimator estimator, std::span<const double> per_j);

// Scores after adding the character of `marginal` to the basis: each entry
// drops by (v_m . gradient_j)^2, clamped at 0.
std::vector<double> incremental_scores(std::span<const double> previous, VarMask marginal,
                                       const std::vector<Vec>& gradients,
                                       std::size_t num_variables);

// Greedy descent per region, minimizing the sum or max estimator.
SearchResult vs_search(const std::vector<AlphaSet>& stages, Estimator estimator, StageScope scope);

// Greedy descent minimizing the B or E bound under LP or VS switch tests.
// Scope All minimizes the max over stages, Last the final stage's bound.
SearchResult greedy_bound_search(const Pomdp& model, const std::vector<AlphaSet>& stages,
                                 BoundKind kind, SwitchMethod tests, StageScope scope,
                                 const AltOptions& alt = {});

SearchResult run_search(const Pomdp& model, const std::vector<AlphaSet>& stages,
                        const SearchConfig& config);

}  // namespace beliefvs
