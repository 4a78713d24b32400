#pragma once

// Fold-split invariants: disjoint, covering [0, n), sizes differing by <= 1.

#include <string>
#include <vector>

#include "gtvseg/pipeline/folds.hpp"

namespace oracle {

/// Empty when every invariant holds, otherwise the first violation.
inline std::string split_violation(const gtvseg::pipeline::FoldSplit& split, std::size_t n, int k) {
  if (static_cast<int>(split.size()) != k) return "fold count";
  std::vector<int> seen(n, 0);
  std::size_t lo = n, hi = 0;
  for (const auto& f : split) {
    lo = std::min(lo, f.size());
    hi = std::max(hi, f.size());
    for (std::size_t i : f) {
      if (i >= n) return "index out of range";
      if (seen[i]++) return "index in two folds";
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!seen[i]) return "index not covered";
  }
  if (hi - lo > 1) return "unbalanced fold sizes";
  for (int f = 0; f < k; ++f) {
    const auto train = gtvseg::pipeline::training_indices(split, f);
    if (train.size() + split[f].size() != n) return "training set size";
    for (std::size_t i : split[f]) {
      if (std::binary_search(train.begin(), train.end(), i)) return "validation case in training set";
    }
  }
  return {};
}

}  // namespace oracle
