#pragma once

#include <cstdint>
#include <vector>

#include "gtvseg/volcore/volume.hpp"

namespace gtvseg {

/// 6-connected component labelling. Labels are 1-based in raster-scan order of
/// each component's first voxel; 0 is background.
struct Components {
  Image<std::int32_t> labels;
  std::vector<std::size_t> sizes;   // sizes[label - 1]
  std::vector<Box> boxes;           // boxes[label - 1]
  std::size_t count() const { return sizes.size(); }
};

Components label_components(const Mask& m);

/// Mask of the voxels whose label is in `keep` (1-based labels).
Mask select_components(const Components& c, const std::vector<int>& keep);

/// Fills background regions not 4-connected to the slice border, per z slice.
Mask fill_holes_per_slice(const Mask& m);

/// Mask of voxels with value >= threshold (or < threshold when `below`).
Mask threshold(const Volume& v, float level, bool below = false);

}  // namespace gtvseg
