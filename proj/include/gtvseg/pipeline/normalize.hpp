#pragma once

#include <vector>

#include "gtvseg/volcore/volume.hpp"

namespace gtvseg::pipeline {

inline constexpr double kCtClampLo = -200.0;
inline constexpr double kCtClampHi = 300.0;

/// Linear-interpolation percentile (sorted-order position (n-1)q), q in [0, 1].
double percentile(std::vector<float> values, double q);

/// HU clamped to [-200, 300] and mapped affinely onto [0, 1].
Volume normalize_ct(const Volume& ct);
/// Uptake divided by its 99th percentile, clamped to [0, 1]. A non-positive
/// percentile yields an all-zero volume.
Volume normalize_pet(const Volume& pet);

/// {ct} or {ct, pet}, normalized.
std::vector<Volume> normalize_inputs(const Volume& pct, const Volume* pet = nullptr);

}  // namespace gtvseg::pipeline
