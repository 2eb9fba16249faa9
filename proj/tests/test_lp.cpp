#include <array>
#include <cmath>
#include <limits>

#include "doctest.h"
#include "helpers.hpp"

#include "beliefvs/error.hpp"
#include "beliefvs/lp.hpp"

using namespace beliefvs;
using namespace testing;

TEST_CASE("textbook maximization") {
  // max 3x + 5y; x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), 36
  LinearProgram lp(2);
  lp.objective = {3, 5};
  lp.add({1, 0}, Relation::LessEqual, 4);
  lp.add({0, 2}, Relation::LessEqual, 12);
  lp.add({3, 2}, Relation::LessEqual, 18);
  const LpResult r = solve_lp(lp);
  REQUIRE(r.status == LpStatus::Optimal);
  CHECK(r.value == doctest::Approx(36));
  CHECK(r.point[0] == doctest::Approx(2));
  CHECK(r.point[1] == doctest::Approx(6));
}

TEST_CASE("equalities, >= rows and redundant constraints") {
  // min x + y (max -x - y); x + y >= 2, x - y = 0, 2x - 2y = 0
  LinearProgram lp(2);
  lp.objective = {-1, -1};
  lp.add({1, 1}, Relation::GreaterEqual, 2);
  lp.add({1, -1}, Relation::Equal, 0);
  lp.add({2, -2}, Relation::Equal, 0);
  const LpResult r = solve_lp(lp);
  REQUIRE(r.status == LpStatus::Optimal);
  CHECK(r.value == doctest::Approx(-2));
  CHECK(r.point[0] == doctest::Approx(1));
}

TEST_CASE("infeasible and unbounded programs are reported") {
  LinearProgram infeasible(1);
  infeasible.add({1}, Relation::GreaterEqual, 2);
  infeasible.add({1}, Relation::LessEqual, 1);
  CHECK(solve_lp(infeasible).status == LpStatus::Infeasible);

  LinearProgram unbounded(2);
  unbounded.objective = {1, 0};
  unbounded.add({1, -1}, Relation::LessEqual, 1);
  CHECK(solve_lp(unbounded).status == LpStatus::Unbounded);
}

TEST_CASE("free and boxed variables") {
  // max -x subject to x >= -3 via a constraint, x free
  LinearProgram lp(1);
  lp.objective = {-1};
  lp.set_free(0);
  lp.add({1}, Relation::GreaterEqual, -3);
  LpResult r = solve_lp(lp);
  REQUIRE(r.status == LpStatus::Optimal);
  CHECK(r.point[0] == doctest::Approx(-3));

  // max x + y with x in [-2, 1], y in [0.5, 4], x + y <= 3
  LinearProgram box(2);
  box.objective = {1, 2};
  box.lower = {-2, 0.5};
  box.upper = {1, 4};
  box.add({1, 1}, Relation::LessEqual, 3);
  r = solve_lp(box);
  REQUIRE(r.status == LpStatus::Optimal);
  CHECK(r.point[1] == doctest::Approx(4));
  CHECK(r.point[0] == doctest::Approx(-1));
  CHECK(r.value == doctest::Approx(7));

  // only an upper bound
  LinearProgram upper(1);
  upper.objective = {1};
  upper.lower = {-LinearProgram::kInf};
  upper.upper = {2.5};
  r = solve_lp(upper);
  REQUIRE(r.status == LpStatus::Optimal);
  CHECK(r.point[0] == doctest::Approx(2.5));
}

TEST_CASE("degenerate cycling example terminates under Bland's rule") {
  LinearProgram lp(4);
  lp.objective = {0.75, -150, 0.02, -6};
  lp.add({0.25, -60, -0.04, 9}, Relation::LessEqual, 0);
  lp.add({0.5, -90, -0.02, 3}, Relation::LessEqual, 0);
  lp.add({0, 0, 1, 0}, Relation::LessEqual, 1);
  const LpResult r = solve_lp(lp);
  REQUIRE(r.status == LpStatus::Optimal);
  CHECK(r.value == doctest::Approx(0.05));
}

TEST_CASE("non-finite data raises a numerical error") {
  LinearProgram lp(1);
  lp.objective = {std::numeric_limits<double>::quiet_NaN()};
  lp.add({1}, Relation::LessEqual, 1);
  CHECK_THROWS_AS(solve_lp(lp), NumericalError);
}

TEST_CASE("random two-variable programs match vertex enumeration") {
  Rng rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    LinearProgram lp(2);
    lp.objective = {u(rng), u(rng)};
    lp.upper = {3.0, 3.0};
    std::vector<std::array<double, 3>> rows;  // a x + b y <= c
    for (int k = 0; k < 4; ++k) {
      const double a = u(rng), b = u(rng), c = std::abs(u(rng)) + 0.1;
      lp.add({a, b}, Relation::LessEqual, c);
      rows.push_back({a, b, c});
    }
    rows.push_back({-1, 0, 0});
    rows.push_back({0, -1, 0});
    rows.push_back({1, 0, 3});
    rows.push_back({0, 1, 3});
    // the origin is feasible, so the optimum is at some vertex
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < rows.size(); ++i) {
      for (std::size_t j = i + 1; j < rows.size(); ++j) {
        const double det = rows[i][0] * rows[j][1] - rows[i][1] * rows[j][0];
        if (std::abs(det) < 1e-12) continue;
        const double x = (rows[i][2] * rows[j][1] - rows[i][1] * rows[j][2]) / det;
        const double y = (rows[i][0] * rows[j][2] - rows[i][2] * rows[j][0]) / det;
        bool feasible = true;
        for (const auto& r : rows) feasible = feasible && r[0] * x + r[1] * y <= r[2] + 1e-9;
        if (feasible) best = std::max(best, lp.objective[0] * x + lp.objective[1] * y);
      }
    }
    const LpResult r = solve_lp(lp);
    REQUIRE(r.status == LpStatus::Optimal);
    CHECK(r.value == doctest::Approx(best).epsilon(1e-9));
    // reported point is feasible
    for (const auto& row : rows) CHECK(row[0] * r.point[0] + row[1] * r.point[1] <= row[2] + 1e-9);
  }
}

TEST_CASE("solutions are reproducible") {
  Rng rng(8);
  LinearProgram lp(6);
  lp.objective = random_vector(6, rng);
  for (int k = 0; k < 5; ++k) lp.add(random_vector(6, rng, 0.0, 1.0), Relation::LessEqual, 1.0);
  const LpResult a = solve_lp(lp);
  const LpResult b = solve_lp(lp);
  CHECK(a.point == b.point);
  CHECK(a.value == b.value);
}
