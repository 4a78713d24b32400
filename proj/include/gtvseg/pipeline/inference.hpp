#pragma once

#include <functional>
#include <vector>

#include "gtvseg/models/psnn.hpp"
#include "gtvseg/volcore/volume.hpp"

namespace gtvseg::pipeline {

/// xy bounding box of the lung mask grown by `margin` voxels (clamped to the
/// grid), full z extent.
Box lung_crop(const Mask& lungs, int margin);

/// Window starts along one axis covering [lo, hi): step `stride`, the last
/// window shifted inward to end at hi.
std::vector<int> axis_starts(int lo, int hi, int voi, int stride);
std::vector<Index3> window_origins(const Box& crop, Index3 voi, Index3 stride);

/// Maps a (1, C, z, y, x) window to its probability map (z*y*x values).
using WindowModel = std::function<std::vector<float>(const nn::TensorPtr& window)>;

/// Mean over covering windows inside the crop, 0 outside.
Volume sliding_window_infer(const std::vector<Volume>& channels, const Box& crop, Index3 voi,
                            Index3 stride, const WindowModel& model);

/// Eval-mode finest map averaged over the members.
WindowModel ensemble_model(std::vector<models::Psnn>& members);

}  // namespace gtvseg::pipeline
