#include "beliefvs/lp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "beliefvs/error.hpp"

namespace beliefvs {

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kOptimalityTol = 1e-9;

// How an original variable is expressed in nonnegative tableau columns:
// x = offset + sign_pos * y[pos] (- y[neg] when split).
struct VarMap {
  double offset = 0.0;
  std::size_t pos = 0;
  double sign = 1.0;
  bool split = false;
  std::size_t neg = 0;
};

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols) : cols_(cols + 1), data_((rows + 1) * (cols + 1), 0.0) {
    num_rows_ = rows;
    basis_.assign(rows, 0);
  }

  double& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  double& rhs(std::size_t r) { return at(r, cols_ - 1); }
  double rhs(std::size_t r) const { return at(r, cols_ - 1); }
  // Objective row: z + sum_j d_j y_j = value.
  double& obj(std::size_t c) { return at(num_rows_, c); }
  double& obj_value() { return at(num_rows_, cols_ - 1); }

  std::size_t rows() const { return num_rows_; }
  std::size_t cols() const { return cols_ - 1; }
  std::vector<std::size_t>& basis() { return basis_; }

  void pivot(std::size_t pr, std::size_t pc) {
    const double inv = 1.0 / at(pr, pc);
    for (std::size_t c = 0; c < cols_; ++c) at(pr, c) *= inv;
    at(pr, pc) = 1.0;
    for (std::size_t r = 0; r <= num_rows_; ++r) {
      if (r == pr) continue;
      const double f = at(r, pc);
      if (f == 0.0) continue;
      for (std::size_t c = 0; c < cols_; ++c) at(r, c) -= f * at(pr, c);
      at(r, pc) = 0.0;
    }
    basis_[pr] = pc;
  }

  void remove_row(std::size_t r) {
    data_.erase(data_.begin() + static_cast<std::ptrdiff_t>(r * cols_),
                data_.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols_));
    basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(r));
    --num_rows_;
  }

  // Bland's rule iterations. Columns flagged in `excluded` never enter.
  // Returns false when the objective is unbounded.
  bool run(const std::vector<bool>& excluded, std::size_t& budget) {
    for (;;) {
      std::size_t enter = cols();
      for (std::size_t c = 0; c < cols(); ++c) {
        if (!excluded[c] && obj(c) < -kOptimalityTol) {
          enter = c;
          break;
        }
      }
      if (enter == cols()) return true;

      std::size_t leave = rows();
      double best = 0.0;
      for (std::size_t r = 0; r < rows(); ++r) {
        const double a = at(r, enter);
        if (a <= kPivotTol) continue;
        const double ratio = rhs(r) / a;
        if (leave == rows() || ratio < best - 1e-12 * (1.0 + std::abs(best)) ||
            (std::abs(ratio - best) <= 1e-12 * (1.0 + std::abs(best)) &&
             basis_[r] < basis_[leave])) {
          leave = r;
          best = ratio;
        }
      }
      if (leave == rows()) return false;
      if (budget == 0) throw NumericalError("solve_lp: pivot budget exhausted");
      --budget;
      pivot(leave, enter);
      if (!std::isfinite(obj_value())) throw NumericalError("solve_lp: non-finite pivot");
    }
  }

 private:
  std::size_t cols_;
  std::size_t num_rows_ = 0;
  std::vector<double> data_;
  std::vector<std::size_t> basis_;
};

void check_finite(const LinearProgram& lp) {
  auto finite = [](const Vec& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
  };
  if (!finite(lp.objective)) throw NumericalError("solve_lp: non-finite objective");
  for (const auto& c : lp.constraints) {
    if (c.coeffs.size() != lp.num_vars()) {
      throw NumericalError("solve_lp: constraint dimension mismatch");
    }
    if (!finite(c.coeffs) || !std::isfinite(c.rhs)) {
      throw NumericalError("solve_lp: non-finite constraint data");
    }
  }
  for (std::size_t j = 0; j < lp.num_vars(); ++j) {
    if (std::isnan(lp.lower[j]) || std::isnan(lp.upper[j]) || lp.lower[j] > lp.upper[j]) {
      throw NumericalError("solve_lp: bad bounds on variable " + std::to_string(j));
    }
  }
}

}  // namespace

LpResult solve_lp(const LinearProgram& lp) {
  check_finite(lp);
  const std::size_t n = lp.num_vars();

  // Rewrite every variable over nonnegative columns.
  std::vector<VarMap> map(n);
  std::size_t structural = 0;
  struct Row {
    Vec coeffs;  // over structural columns, filled after counting
    Relation relation;
    double rhs;
  };
  std::vector<std::pair<std::size_t, double>> upper_rows;  // (var, width)
  for (std::size_t j = 0; j < n; ++j) {
    const bool lo = std::isfinite(lp.lower[j]);
    const bool hi = std::isfinite(lp.upper[j]);
    VarMap& m = map[j];
    m.pos = structural++;
    if (lo) {
      m.offset = lp.lower[j];
      if (hi) upper_rows.emplace_back(j, lp.upper[j] - lp.lower[j]);
    } else if (hi) {
      m.offset = lp.upper[j];
      m.sign = -1.0;
    } else {
      m.split = true;
      m.neg = structural++;
    }
  }

  std::vector<Row> rows;
  rows.reserve(lp.constraints.size() + upper_rows.size());
  for (const auto& c : lp.constraints) {
    Row row{Vec(structural, 0.0), c.relation, c.rhs};
    for (std::size_t j = 0; j < n; ++j) {
      const double a = c.coeffs[j];
      if (a == 0.0) continue;
      row.rhs -= a * map[j].offset;
      row.coeffs[map[j].pos] += a * map[j].sign;
      if (map[j].split) row.coeffs[map[j].neg] -= a;
    }
    rows.push_back(std::move(row));
  }
  for (auto [j, width] : upper_rows) {
    Row row{Vec(structural, 0.0), Relation::LessEqual, width};
    row.coeffs[map[j].pos] = 1.0;
    rows.push_back(std::move(row));
  }
  for (auto& row : rows) {
    if (row.rhs < 0.0) {
      for (double& a : row.coeffs) a = -a;
      row.rhs = -row.rhs;
      if (row.relation == Relation::LessEqual) {
        row.relation = Relation::GreaterEqual;
      } else if (row.relation == Relation::GreaterEqual) {
        row.relation = Relation::LessEqual;
      }
    }
  }

  // Column layout: structural | slack/surplus | artificial.
  std::size_t num_slack = 0;
  std::size_t num_art = 0;
  for (const auto& row : rows) {
    if (row.relation != Relation::Equal) ++num_slack;
    if (row.relation != Relation::LessEqual) ++num_art;
  }
  const std::size_t total = structural + num_slack + num_art;
  Tableau tab(rows.size(), total);
  std::vector<bool> artificial(total, false);
  std::size_t next_slack = structural;
  std::size_t next_art = structural + num_slack;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < structural; ++c) tab.at(r, c) = rows[r].coeffs[c];
    tab.rhs(r) = rows[r].rhs;
    switch (rows[r].relation) {
      case Relation::LessEqual:
        tab.at(r, next_slack) = 1.0;
        tab.basis()[r] = next_slack++;
        break;
      case Relation::GreaterEqual:
        tab.at(r, next_slack++) = -1.0;
        [[fallthrough]];
      case Relation::Equal:
        tab.at(r, next_art) = 1.0;
        artificial[next_art] = true;
        tab.basis()[r] = next_art++;
        break;
    }
  }

  std::size_t budget = 50 * (rows.size() + total) + 1000;
  double scale = 1.0;
  for (const auto& row : rows) scale = std::max(scale, std::abs(row.rhs));

  // Phase 1: maximize -sum(artificials).
  if (num_art > 0) {
    for (std::size_t c = 0; c <= total; ++c) tab.obj(c) = 0.0;
    for (std::size_t c = 0; c < total; ++c) {
      if (artificial[c]) tab.obj(c) = 1.0;
    }
    for (std::size_t r = 0; r < tab.rows(); ++r) {
      if (!artificial[tab.basis()[r]]) continue;
      for (std::size_t c = 0; c < total; ++c) tab.obj(c) -= tab.at(r, c);
      tab.obj_value() -= tab.rhs(r);
    }
    std::vector<bool> none(total, false);
    tab.run(none, budget);
    if (tab.obj_value() < -kLpFeasibilityTol * scale) return {LpStatus::Infeasible, {}, 0.0};

    // Drive remaining artificials out of the basis; drop redundant rows.
    for (std::size_t r = 0; r < tab.rows();) {
      if (!artificial[tab.basis()[r]]) {
        ++r;
        continue;
      }
      std::size_t col = total;
      for (std::size_t c = 0; c < total; ++c) {
        if (!artificial[c] && std::abs(tab.at(r, c)) > kPivotTol) {
          col = c;
          break;
        }
      }
      if (col == total) {
        tab.remove_row(r);
      } else {
        tab.pivot(r, col);
        ++r;
      }
    }
  }

  // Phase 2.
  Vec cost(total, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    cost[map[j].pos] += lp.objective[j] * map[j].sign;
    if (map[j].split) cost[map[j].neg] -= lp.objective[j];
  }
  for (std::size_t c = 0; c < total; ++c) tab.obj(c) = -cost[c];
  tab.obj_value() = 0.0;
  for (std::size_t r = 0; r < tab.rows(); ++r) {
    const double cb = cost[tab.basis()[r]];
    if (cb == 0.0) continue;
    for (std::size_t c = 0; c < total; ++c) tab.obj(c) += cb * tab.at(r, c);
    tab.obj_value() += cb * tab.rhs(r);
  }
  if (!tab.run(artificial, budget)) return {LpStatus::Unbounded, {}, 0.0};

  Vec y(total, 0.0);
  for (std::size_t r = 0; r < tab.rows(); ++r) y[tab.basis()[r]] = std::max(0.0, tab.rhs(r));
  LpResult result;
  result.status = LpStatus::Optimal;
  result.point.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    double x = map[j].offset + map[j].sign * y[map[j].pos];
    if (map[j].split) x -= y[map[j].neg];
    result.point[j] = x;
  }
  result.value = dot(lp.objective, result.point);
  if (!std::isfinite(result.value)) throw NumericalError("solve_lp: non-finite optimum");
  return result;
}

}  // namespace beliefvs
