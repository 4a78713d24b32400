#pragma once

#include <cstdint>
#include <vector>

namespace gtvseg::pipeline {

/// k disjoint lists of case indices covering [0, n), sizes differing by <= 1.
using FoldSplit = std::vector<std::vector<std::size_t>>;

/// Seeded shuffle dealt round-robin into k folds.
FoldSplit make_folds(std::size_t n, int k, std::uint64_t seed);

/// Indices of every fold except `fold`, ascending.
std::vector<std::size_t> training_indices(const FoldSplit& split, int fold);

}  // namespace gtvseg::pipeline
