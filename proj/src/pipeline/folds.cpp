#include "gtvseg/pipeline/folds.hpp"

#include <algorithm>
#include <numeric>

#include "gtvseg/volcore/geometry.hpp"
#include "gtvseg/volcore/rng.hpp"

namespace gtvseg::pipeline {

FoldSplit make_folds(std::size_t n, int k, std::uint64_t seed) {
  if (k < 2) throw Error("need at least 2 folds");
  if (n < static_cast<std::size_t>(k)) {
    throw Error("cannot split " + std::to_string(n) + " cases into " + std::to_string(k) + " folds");
  }
  std::vector<std::size_t> ids(n);
  std::iota(ids.begin(), ids.end(), 0);
  Rng rng(derive_seed(seed, 0xF01D));
  rng.shuffle(ids);
  FoldSplit split(k);
  for (std::size_t i = 0; i < n; ++i) split[i % k].push_back(ids[i]);
  for (auto& f : split) std::sort(f.begin(), f.end());
  return split;
}

std::vector<std::size_t> training_indices(const FoldSplit& split, int fold) {
  std::vector<std::size_t> out;
  for (int f = 0; f < static_cast<int>(split.size()); ++f) {
    if (f != fold) out.insert(out.end(), split[f].begin(), split[f].end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace gtvseg::pipeline
