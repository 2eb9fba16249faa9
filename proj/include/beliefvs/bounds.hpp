#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "beliefvs/alpha.hpp"
#include "beliefvs/model.hpp"
#include "beliefvs/projection.hpp"

namespace beliefvs {

enum class SwitchMethod { LP, VS, Oracle };

const char* to_string(SwitchMethod method);

// Objective (LP) or relative residual (VS) above which a test is positive.
inline constexpr double kSwitchThreshold = 1e-7;

// alpha_i - alpha_j.
struct GradientVector {
  std::size_t i = 0;
  std::size_t j = 0;
  Vec diff;
};

GradientVector gradient(const AlphaSet& set, std::size_t i, std::size_t j);

struct SwitchDecision {
  bool switches = false;
  SwitchMethod method = SwitchMethod::VS;
  // LP optimum x, squared residual length for VS, best margin for Oracle.
  double objective = 0.0;
  // (b, b'): exact and approximate belief of a found switch.
  std::optional<std::pair<Vec, Vec>> witness;
};

// LP relaxation: is there a belief b favouring alpha_i and a b' with the same
// family marginals favouring alpha_j?
//   max x  s.t.  b.(ai-aj) >= x,  b'.(aj-ai) >= x,
//                v_m.b' = v_m.b for every family member m,
//                sum b = 1,  b, b' >= 0.
SwitchDecision lp_switch_test(std::span<const double> alpha_i, std::span<const double> alpha_j,
                              const ConstraintFamily& family);
SwitchDecision lp_switch_test(std::span<const double> alpha_i, std::span<const double> alpha_j,
                              const ProjectionScheme& scheme);

// Positive iff alpha_i - alpha_j has a component outside the span of the
// basis, i.e. residual^2 > (1e-7 |alpha_ij|)^2.
SwitchDecision vs_switch_test(std::span<const double> alpha_i, std::span<const double> alpha_j,
                              const WalshBasis& basis);

struct OracleOptions {
  std::size_t samples = 100000;
  std::uint64_t seed = 0;
  // Restrict the argmax to {alpha_i, alpha_j}.
  bool pairwise = false;
};

// Sampling check: some uniform belief b has argmax(b) = i while
// argmax(project(b)) = j. One-sided: false means no evidence was found.
SwitchDecision oracle_switch_test(std::size_t i, std::size_t j, const AlphaSet& set,
                                  const ProjectionScheme& scheme, const OracleOptions& options);

struct SwitchOptions {
  SwitchMethod method = SwitchMethod::VS;
  OracleOptions oracle;
};

// switch_sets[i] = sorted indices j != i with a positive test.
using SwitchSets = std::vector<std::vector<std::size_t>>;

std::vector<std::size_t> switch_set(std::size_t i, const AlphaSet& set,
                                    const ProjectionScheme& scheme, const SwitchOptions& options);
SwitchSets switch_sets(const AlphaSet& set, const ProjectionScheme& scheme,
                       const SwitchOptions& options);
// Vector i of `set` is tested under assignment.scheme_for(set.stage, i).
SwitchSets switch_sets(const AlphaSet& set, const SchemeAssignment& assignment,
                       const SwitchOptions& options);

// max over i, j in Sw(i), s of alpha_i(s) - alpha_j(s); 0 when all sets are empty.
double bound_B(const AlphaSet& set, const SwitchSets& sets);

struct AltOptions {
  // Largest Alt set (or intermediate cross-sum) before GuardError.
  double max_set_size = 1e5;
};

// alt[k-1][i] holds the value vectors of the plans reachable from vector i
// of stage k when every future belief is approximated:
//   Alt^1(a) = {a} u Sw^1(a)
//   Alt^k(a) = U_{a' = <a'; s'> in {a} u Sw^k(a)} { <a'; t> : t(z) in Alt^{k-1}(s'(z)) }
// Members that pointwise dominate another member are dropped.
using AltSets = std::vector<std::vector<std::vector<Vec>>>;

AltSets alt_sets(const Pomdp& model, const std::vector<AlphaSet>& stages,
                 const std::vector<SwitchSets>& switch_sets_per_stage,
                 const AltOptions& options = {});

// E^k per stage: max over a in stage k, a' in Alt^k(a), s of a(s) - a'(s), >= 0.
std::vector<double> bound_E(const std::vector<AlphaSet>& stages, const AltSets& alt);

struct BoundsOptions {
  SwitchOptions switches;
  bool compute_e = true;
  AltOptions alt;
  // When false, an Alt-set guard error propagates instead of leaving E unset.
  bool tolerate_alt_guard = true;
};

struct StageBounds {
  std::size_t stage = 0;
  double b = 0.0;
  std::optional<double> e;
  SwitchSets switch_sets;
  std::vector<std::size_t> alt_set_sizes;
};

struct BoundsReport {
  SchemeAssignment scheme;
  SwitchMethod method = SwitchMethod::VS;
  std::vector<StageBounds> per_stage;

  double max_b() const;
  // Unset when the Alt construction hit its guard.
  std::optional<double> max_e() const;
};

BoundsReport compute_bounds(const Pomdp& model, const std::vector<AlphaSet>& stages,
                            const SchemeAssignment& scheme, const BoundsOptions& options);

}  // namespace beliefvs
