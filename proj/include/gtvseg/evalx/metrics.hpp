#pragma once

#include <optional>
#include <vector>

#include "gtvseg/volcore/volume.hpp"

namespace gtvseg::eval {

/// 2|A∩B| / (|A|+|B|); 1 when both masks are empty.
double dsc(const Mask& a, const Mask& b);

/// Set voxels with at least one 6-neighbour unset or outside the grid.
Mask surface_mask(const Mask& m);
/// World centers (mm) of the surface voxels, raster order.
std::vector<Vec3> surface(const Mask& m);

/// Exact Euclidean distance (mm, anisotropic spacing) from every voxel center
/// to the nearest set voxel center of `target`; +inf everywhere when empty.
std::vector<double> distance_transform(const Mask& target);

/// Distances from each surface voxel of `from` to the surface of `to`.
std::vector<double> directed_surface_distances(const Mask& from, const Mask& to);

enum class Hd95Mode {
  pooled,           // 95th percentile of both directed multisets pooled
  max_of_directed,  // max of the two directed 95th percentiles
};

/// Sorted-order linear-interpolation percentile of q in [0, 1].
double percentile_linear(std::vector<double> values, double q);

/// Both return nullopt when either surface is empty.
std::optional<double> hd95(const Mask& a, const Mask& b, Hd95Mode mode = Hd95Mode::pooled);
std::optional<double> asd(const Mask& a, const Mask& b);

}  // namespace gtvseg::eval
