#include "beliefvs/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "beliefvs/error.hpp"
#include "beliefvs/lp.hpp"

namespace beliefvs {

namespace {

// G[z][j](s) = sum_s' P(s'|s,a) P(z|s',a) prev[j](s').
std::vector<std::vector<Vec>> projected_successors(const Pomdp& model, std::size_t action,
                                                   const AlphaSet& prev) {
  const std::size_t states = model.num_states();
  const Table& t = model.transition[action];
  const Table& o = model.observation[action];
  std::vector<std::vector<Vec>> g(model.num_observations(),
                                  std::vector<Vec>(prev.size(), Vec(states, 0.0)));
  Vec weighted(states);
  for (std::size_t z = 0; z < model.num_observations(); ++z) {
    for (std::size_t j = 0; j < prev.size(); ++j) {
      const Vec& next = prev.vectors[j].values;
      for (std::size_t sp = 0; sp < states; ++sp) weighted[sp] = o(sp, z) * next[sp];
      for (std::size_t s = 0; s < states; ++s) g[z][j][s] = dot(t.row(s), weighted);
    }
  }
  return g;
}

// Lexicographically larger vectors win near-ties so that the chosen vector is
// on the upper surface.
bool better_at(std::span<const double> belief, const Vec& a, const Vec& b) {
  const double va = dot(belief, a);
  const double vb = dot(belief, b);
  const double tie = 1e-12 * (1.0 + std::abs(va) + std::abs(vb));
  if (std::abs(va - vb) > tie) return va > vb;
  return std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
}

std::size_t best_in(const std::vector<std::size_t>& pool, const AlphaSet& set,
                    std::span<const double> belief) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < pool.size(); ++k) {
    if (better_at(belief, set[pool[k]].values, set[pool[best]].values)) best = k;
  }
  return best;
}

// max delta s.t. b.(phi - w) >= delta for all w in kept, b in the simplex.
LpResult witness_lp(const Vec& phi, const std::vector<std::size_t>& kept, const AlphaSet& set) {
  const std::size_t states = phi.size();
  LinearProgram lp(states + 1);
  lp.objective[states] = 1.0;
  lp.set_free(states);
  for (std::size_t w : kept) {
    Vec row(states + 1);
    for (std::size_t s = 0; s < states; ++s) row[s] = set[w].values[s] - phi[s];
    row[states] = 1.0;
    lp.add(std::move(row), Relation::LessEqual, 0.0);
  }
  Vec simplex(states + 1, 1.0);
  simplex[states] = 0.0;
  lp.add(std::move(simplex), Relation::Equal, 1.0);
  return solve_lp(lp);
}

double value_recursive(const Pomdp& model, const BeliefState& b, std::size_t k) {
  if (k == 0) return 0.0;
  const double immediate = dot(b.probs(), model.reward);
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < model.num_actions(); ++a) {
    const Vec predicted = predict(model, b.probs(), a);
    double future = 0.0;
    for (std::size_t z = 0; z < model.num_observations(); ++z) {
      const double pz = observation_probability(model, predicted, a, z);
      if (pz < kZeroProbability) continue;
      future += pz * value_recursive(model, belief_update(model, b, a, z), k - 1);
    }
    best = std::max(best, immediate + model.discount * future);
  }
  return best;
}

}  // namespace

AlphaSet base_set(const Pomdp& model) {
  AlphaSet set;
  set.stage = 0;
  set.vectors.push_back({Vec(model.num_states(), 0.0), 0, {}, 0});
  return set;
}

AlphaSet backup(const Pomdp& model, const AlphaSet& prev, const SolverOptions& options) {
  if (prev.empty()) throw InputError("backup: empty previous set");
  const std::size_t nz = model.num_observations();
  const double count = static_cast<double>(model.num_actions()) *
                       std::pow(static_cast<double>(prev.size()), static_cast<double>(nz));
  if (count > options.enumeration_cap) {
    throw GuardError("backup: stage " + std::to_string(prev.stage + 1) + " would enumerate " +
                     std::to_string(count) + " vectors (cap " +
                     std::to_string(options.enumeration_cap) + ")");
  }

  AlphaSet out;
  out.stage = prev.stage + 1;
  out.vectors.reserve(static_cast<std::size_t>(count));
  const std::size_t states = model.num_states();
  for (std::size_t a = 0; a < model.num_actions(); ++a) {
    const auto g = projected_successors(model, a, prev);
    std::vector<std::size_t> sigma(nz, 0);
    bool done = false;
    while (!done) {
      AlphaVector v;
      v.values = model.reward;
      v.action = a;
      v.strategy = sigma;
      v.stage = out.stage;
      for (std::size_t s = 0; s < states; ++s) {
        double future = 0.0;
        for (std::size_t z = 0; z < nz; ++z) future += g[z][sigma[z]][s];
        v.values[s] += model.discount * future;
      }
      out.vectors.push_back(std::move(v));

      // odometer over observation strategies, last observation fastest
      std::size_t z = nz;
      for (;;) {
        if (z == 0) {
          done = true;
          break;
        }
        --z;
        if (++sigma[z] < prev.size()) break;
        sigma[z] = 0;
      }
    }
  }
  return out;
}

AlphaSet prune(const AlphaSet& set, double tolerance) {
  AlphaSet out;
  out.stage = set.stage;
  if (set.empty()) return out;
  const std::size_t states = set[0].values.size();

  // Pointwise pass: an earlier equal vector dominates a later one.
  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i < set.size(); ++i) {
    const Vec& v = set[i].values;
    bool dominated = false;
    for (std::size_t k : pool) {
      if (pointwise_geq(set[k].values, v)) {
        dominated = true;
        break;
      }
    }
    if (dominated) continue;
    std::erase_if(pool, [&](std::size_t k) { return pointwise_geq(v, set[k].values); });
    pool.push_back(i);
  }

  std::vector<std::size_t> kept;
  Vec corner(states, 0.0);
  for (std::size_t s = 0; s < states && !pool.empty(); ++s) {
    corner[s] = 1.0;
    const std::size_t k = best_in(pool, set, corner);
    const bool covered = std::any_of(kept.begin(), kept.end(), [&](std::size_t w) {
      return !better_at(corner, set[pool[k]].values, set[w].values);
    });
    if (!covered) {
      kept.push_back(pool[k]);
      pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(k));
    }
    corner[s] = 0.0;
  }

  while (!pool.empty()) {
    const std::size_t phi = pool.front();
    const LpResult w = witness_lp(set[phi].values, kept, set);
    if (w.status != LpStatus::Optimal) {
      throw NumericalError("prune: witness LP did not reach an optimum");
    }
    if (w.point[states] <= tolerance) {
      pool.erase(pool.begin());
      continue;
    }
    std::span<const double> belief(w.point.data(), states);
    const std::size_t k = best_in(pool, set, belief);
    kept.push_back(pool[k]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(k));
  }

  std::sort(kept.begin(), kept.end());
  for (std::size_t i : kept) out.vectors.push_back(set[i]);
  return out;
}

std::vector<AlphaSet> solve(const Pomdp& model, std::size_t horizon, const SolverOptions& options) {
  if (horizon == 0) throw InputError("solve: horizon must be at least 1");
  std::vector<AlphaSet> stages;
  AlphaSet prev = base_set(model);
  for (std::size_t k = 1; k <= horizon; ++k) {
    AlphaSet next = prune(backup(model, prev, options), options.prune_tolerance);
    stages.push_back(next);
    prev = std::move(next);
  }
  return stages;
}

double brute_force_value(const Pomdp& model, const BeliefState& b, std::size_t k,
                         double branch_cap) {
  const double branches = std::pow(
      static_cast<double>(model.num_actions() * model.num_observations()), static_cast<double>(k));
  if (branches > branch_cap) {
    throw GuardError("brute_force_value: " + std::to_string(branches) + " branches exceed cap");
  }
  if (b.size() != model.num_states()) throw InputError("brute_force_value: dimension mismatch");
  return value_recursive(model, b, k);
}

}  // namespace beliefvs
