#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "helpers.hpp"

#include "beliefvs/error.hpp"
#include "beliefvs/search.hpp"

using namespace beliefvs;
using namespace testing;

namespace {

double explicit_residual(const Vec& w, const WalshBasis& basis) {
  Vec r = w;
  for (const Vec& v : basis.vectors) {
    const double c = dot(w, v);
    for (std::size_t s = 0; s < r.size(); ++s) r[s] -= c * v[s];
  }
  return dot(r, r);
}

// Replays a VS trace and checks every step against exhaustive child scoring.
void check_vs_trace(const SearchTrace& trace, const AlphaSet& set, Estimator estimator,
                    std::size_t n) {
  const std::size_t i = *trace.region;
  ProjectionScheme node = lattice_root(n);
  auto score_of = [&](const ProjectionScheme& s) {
    return estimator == Estimator::Sum ? estimator_sum(i, set, build_basis(s))
                                       : estimator_max(i, set, build_basis(s));
  };
  CHECK(trace.steps.front().score == doctest::Approx(score_of(node)).epsilon(1e-9));
  for (std::size_t k = 1; k < trace.steps.size(); ++k) {
    const auto children = lattice_children(node);
    double best = 0.0;
    std::size_t arg = 0;
    for (std::size_t c = 0; c < children.size(); ++c) {
      const double s = score_of(children[c].child);
      if (c == 0 || s < best - 1e-9) {
        best = s;
        arg = c;
      }
    }
    CHECK(trace.steps[k].merged == children[arg].marginal);
    CHECK(std::abs(trace.steps[k].score - best) <= 1e-9);
    CHECK(trace.steps[k].score <= trace.steps[k - 1].score + 1e-12);
    node = children[arg].child;
  }
}

}  // namespace

TEST_CASE("estimators match explicit residual vectors") {
  Rng rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Vec> values;
    for (int k = 0; k < 5; ++k) values.push_back(random_vector(16, rng));
    const AlphaSet set = set_of(values);
    const WalshBasis basis = build_basis(lattice_root(4));
    for (std::size_t i = 0; i < set.size(); ++i) {
      double sum = 0.0, max = 0.0;
      for (std::size_t j = 0; j < set.size(); ++j) {
        if (j == i) continue;
        const double r = explicit_residual(subtract(set[i].values, set[j].values), basis);
        sum += r;
        max = std::max(max, r);
      }
      CHECK(estimator_sum(i, set, basis) == doctest::Approx(sum).epsilon(1e-9));
      CHECK(estimator_max(i, set, basis) == doctest::Approx(max).epsilon(1e-9));
      const WalshBasis full = build_basis(ProjectionScheme::identity(4));
      CHECK(estimator_sum(i, set, full) <= 1e-9 * sum);
    }
  }
  const AlphaSet single = set_of({{1.0, 2.0, 3.0, 4.0}});
  CHECK(estimator_sum(0, single, build_basis(lattice_root(2))) == 0.0);
  CHECK(estimator_max(0, single, build_basis(lattice_root(2))) == 0.0);
  CHECK(aggregate(Estimator::Max, std::vector<double>{}) == 0.0);
}

TEST_CASE("incremental updates subtract one squared coefficient") {
  const std::size_t n = 3;
  const Vec v = walsh_vector(0b011, n);
  const Vec orth = walsh_vector(0b101, n);
  const std::vector<Vec> gradients = {v, orth};
  const std::vector<double> prev = {1.0, 1.0};
  const auto next = incremental_scores(prev, 0b011, gradients, n);
  CHECK(std::abs(next[0]) <= 1e-15);
  CHECK(next[1] == doctest::Approx(1.0));
  CHECK_THROWS_AS(incremental_scores(std::vector<double>{1.0}, 0b011, gradients, n), InputError);
}

TEST_CASE("incremental scores agree with recomputation along random descents") {
  Rng rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 4 + trial % 3;
    std::vector<Vec> values;
    for (int k = 0; k < 4; ++k) values.push_back(random_vector(std::size_t{1} << n, rng));
    const AlphaSet set = set_of(values);
    std::vector<Vec> gradients;
    for (std::size_t j = 1; j < set.size(); ++j) gradients.push_back(subtract(set[0].values, set[j].values));
    ProjectionScheme node = lattice_root(n);
    std::vector<double> scores = pairwise_residuals(0, set, build_basis(node));
    for (;;) {
      const auto children = lattice_children(node);
      if (children.empty()) break;
      std::uniform_int_distribution<std::size_t> pick(0, children.size() - 1);
      const LatticeEdge& edge = children[pick(rng)];
      scores = incremental_scores(scores, edge.marginal, gradients, n);
      node = edge.child;
      const auto fresh = pairwise_residuals(0, set, build_basis(node));
      for (std::size_t j = 0; j < fresh.size(); ++j) CHECK(std::abs(scores[j] - fresh[j]) <= 1e-9);
    }
  }
}

TEST_CASE("VS search on two variables merges them wherever a gradient crosses") {
  const Pomdp m = make_random(3, 2, 3, 2);
  const auto stages = solve(m, 3);
  for (Estimator e : {Estimator::Sum, Estimator::Max}) {
    const SearchResult r = vs_search(stages, e, StageScope::All);
    REQUIRE_FALSE(r.schemes.is_global());
    for (const AlphaSet& set : stages) {
      for (std::size_t i = 0; i < set.size(); ++i) {
        const auto expect = set.size() > 1 ? ProjectionScheme::identity(2) : lattice_root(2);
        CHECK(r.schemes.scheme_for(set.stage, i) == expect);
      }
    }
  }
}

TEST_CASE("constant gradients keep the root") {
  AlphaSet set = set_of({Vec(8, 1.0), Vec(8, 3.0), Vec(8, -2.0)});
  const SearchResult r = vs_search({set}, Estimator::Sum, StageScope::All);
  for (std::size_t i = 0; i < 3; ++i) CHECK(r.schemes.scheme_for(1, i) == lattice_root(3));
}

TEST_CASE("VS search steps match exhaustive child scoring") {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const Pomdp m = make_random(70 + seed, 4, 2, 2);
    const auto stages = solve(m, 3);
    for (Estimator e : {Estimator::Sum, Estimator::Max}) {
      const SearchResult r = vs_search(stages, e, StageScope::All);
      for (const SearchTrace& t : r.traces) {
        REQUIRE(t.stage);
        check_vs_trace(t, stages[*t.stage - 1], e, 4);
      }
      const SearchResult last = vs_search(stages, e, StageScope::Last);
      CHECK(last.schemes.per_region().size() == 1);
      CHECK(last.schemes.covers(3));
      CHECK_FALSE(last.schemes.covers(2));
    }
  }
}

TEST_CASE("B-VS descent accepts the child with the smallest bound") {
  const Pomdp m = make_random(80, 4, 2, 2);
  const auto stages = solve(m, 3);
  const SearchResult r = greedy_bound_search(m, stages, BoundKind::B, SwitchMethod::VS, StageScope::All);
  REQUIRE(r.traces.size() == 1);
  const auto& steps = r.traces[0].steps;
  SwitchOptions vs;
  auto bound = [&](const ProjectionScheme& s) {
    double b = 0.0;
    for (const AlphaSet& set : stages) b = std::max(b, bound_B(set, switch_sets(set, s, vs)));
    return b;
  };
  ProjectionScheme node = lattice_root(4);
  CHECK(steps[0].score == bound(node));
  for (std::size_t k = 1; k < steps.size(); ++k) {
    const auto children = lattice_children(node);
    double best = 0.0;
    std::size_t arg = 0;
    for (std::size_t c = 0; c < children.size(); ++c) {
      const double b = bound(children[c].child);
      if (c == 0 || b < best) {
        best = b;
        arg = c;
      }
    }
    CHECK(steps[k].merged == children[arg].marginal);
    CHECK(steps[k].score == best);
    CHECK(steps[k].score <= steps[k - 1].score);
    node = children[arg].child;
  }
  CHECK(r.schemes.global() == node);
}

TEST_CASE("bound searches stop at a zero bound") {
  const Pomdp m = make_random(81, 3, 1, 1);
  const auto stages = solve(m, 3);
  for (BoundKind kind : {BoundKind::B, BoundKind::E}) {
    const SearchResult r = greedy_bound_search(m, stages, kind, SwitchMethod::VS, StageScope::All);
    CHECK(r.schemes.global() == lattice_root(3));
    CHECK(r.traces[0].steps.size() == 1);
  }
  CHECK_THROWS_AS(greedy_bound_search(m, stages, BoundKind::B, SwitchMethod::Oracle, StageScope::All),
                  InputError);
}

TEST_CASE("every method returns pair-bounded schemes deterministically") {
  const Pomdp m = make_random(85, 2, 2, 2);
  const Pomdp m4 = make_random(83, 4, 2, 2);
  const auto stages = solve(m, 3);
  const auto stages4 = solve(m4, 2);
  for (auto method : {SearchMethod::BLp, SearchMethod::BVs, SearchMethod::ELp, SearchMethod::EVs,
                      SearchMethod::VsSum, SearchMethod::VsMax}) {
    CHECK(parse_search_method(to_string(method)) == method);
    SearchConfig config;
    config.method = method;
    const SearchResult r = run_search(m, stages, config);
    CHECK(r.method == method);
    if (r.schemes.is_global()) CHECK(r.schemes.global() == ProjectionScheme::identity(2));

    const SearchResult a = run_search(m4, stages4, config);
    const SearchResult b = run_search(m4, stages4, config);
    auto schemes_of = [](const SearchResult& x) {
      std::vector<ProjectionScheme> out;
      if (x.schemes.is_global()) return std::vector<ProjectionScheme>{x.schemes.global()};
      for (const auto& [stage, list] : x.schemes.per_region()) out.insert(out.end(), list.begin(), list.end());
      return out;
    };
    CHECK(schemes_of(a) == schemes_of(b));
    for (const auto& s : schemes_of(a)) {
      CHECK(s.max_block_size() <= 2);
      CHECK(s.num_variables() == 4);
    }
  }
  CHECK_FALSE(parse_search_method("b_lp"));
  CHECK(parse_stage_scope("last") == StageScope::Last);
  CHECK_FALSE(parse_stage_scope("first"));
}
