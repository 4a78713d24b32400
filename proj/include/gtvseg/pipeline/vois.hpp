#pragma once

#include <vector>

#include "gtvseg/nnet/tensor.hpp"
#include "gtvseg/pipeline/config.hpp"
#include "gtvseg/volcore/rng.hpp"
#include "gtvseg/volcore/volume.hpp"

namespace gtvseg::pipeline {

/// Training sample: image (1, C, z, y, x) and ground truth (1, 1, z, y, x).
struct Patch {
  nn::Tensor image;
  nn::Tensor gt;
  Index3 lo;  // window origin in the source volume
  bool positive = false;
};

struct VoiPlan {
  Index3 center;
  Index3 lo;
  bool positive = false;
};

/// Window origin for a VOI centered at `center`, shifted inward at borders.
Index3 window_origin(Index3 center, Index3 voi, Index3 dims);

/// Positive centers drawn uniformly among gt voxels, negatives uniformly among
/// the other voxels.
std::vector<VoiPlan> plan_vois(const Mask& gt, Index3 voi, int positives, int negatives, Rng& rng);

Patch extract_patch(const std::vector<Volume>& channels, const Mask& gt, Index3 lo, Index3 voi);

std::vector<Patch> sample_vois(const std::vector<Volume>& channels, const Mask& gt,
                               const TrainConfig& cfg, Rng& rng);

}  // namespace gtvseg::pipeline
