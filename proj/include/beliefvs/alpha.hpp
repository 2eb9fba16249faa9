#pragma once

#include <cstddef>
#include <vector>

#include "beliefvs/linalg.hpp"

namespace beliefvs {

// Value of the conditional plan <action; strategy>: do `action`, then follow
// the stage-(k-1) vector strategy[z] after observing z. Stage-0 vectors carry
// an empty strategy.
struct AlphaVector {
  Vec values;
  std::size_t action = 0;
  std::vector<std::size_t> strategy;
  std::size_t stage = 0;
};

struct AlphaSet {
  std::size_t stage = 0;
  std::vector<AlphaVector> vectors;

  std::size_t size() const { return vectors.size(); }
  bool empty() const { return vectors.empty(); }
  const AlphaVector& operator[](std::size_t i) const { return vectors[i]; }
};

}  // namespace beliefvs
