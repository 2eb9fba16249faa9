#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "beliefvs/model.hpp"
#include "beliefvs/random.hpp"
#include "beliefvs/solver.hpp"

namespace testing {

using namespace beliefvs;

inline Pomdp make_random(std::uint64_t seed, std::size_t n, std::size_t actions = 2,
                         std::size_t obs = 2) {
  Rng rng(seed);
  RandomPomdpOptions options;
  options.num_variables = n;
  options.num_actions = actions;
  options.num_observations = obs;
  return random_pomdp(options, rng);
}

inline Vec random_vector(std::size_t dim, Rng& rng, double lo = -5.0, double hi = 5.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vec v(dim);
  for (double& x : v) x = u(rng);
  return v;
}

inline double max_abs_diff(const Vec& a, const Vec& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

inline AlphaSet set_of(std::vector<Vec> values, std::size_t stage = 1) {
  AlphaSet set;
  set.stage = stage;
  for (auto& v : values) set.vectors.push_back({std::move(v), 0, {}, stage});
  return set;
}

// Two variables, two actions, two observations, written by hand.
inline nlohmann::json toy_model_json() {
  return nlohmann::json::parse(R"({
    "variables": ["X", "Y"],
    "actions": ["stay", "flip"],
    "observations": ["lo", "hi"],
    "transitions": {
      "stay": {"cpts": {
        "X": {"parents": ["X"], "rows": [[0.9, 0.1], [0.2, 0.8]]},
        "Y": {"parents": ["X", "Y"], "rows": [[0.7, 0.3], [0.4, 0.6], [0.5, 0.5], [0.1, 0.9]]}
      }},
      "flip": {"flat": [[0.1, 0.2, 0.3, 0.4],
                        [0.25, 0.25, 0.25, 0.25],
                        [0.4, 0.3, 0.2, 0.1],
                        [0.0, 0.0, 0.5, 0.5]]}
    },
    "observation": {
      "stay": [[0.8, 0.2], [0.6, 0.4], [0.3, 0.7], [0.1, 0.9]],
      "flip": [[0.5, 0.5], [0.5, 0.5], [0.5, 0.5], [0.5, 0.5]]
    },
    "reward": [0.0, 1.0, 2.0, 5.0],
    "discount": 0.9
  })");
}

}  // namespace testing
