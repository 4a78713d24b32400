#pragma once

#include "gtvseg/volcore/volume.hpp"

namespace gtvseg {

inline constexpr float kCtBackground = -1024.0f;
inline constexpr float kPetBackground = 0.0f;

enum class Interp { trilinear, nearest };

/// Trilinear interpolation at world point `p`. A point is inside when its
/// continuous voxel index lies within [0, dim-1] on every axis; otherwise
/// `background` is returned.
float sample_trilinear(const Volume& v, Vec3 p, float background = kCtBackground);

/// Nearest voxel value; inside when the nearest voxel is in the grid.
template <typename T>
T sample_nearest(const Image<T>& v, Vec3 p, T background) {
  const Index3 i = v.geometry().nearest_voxel(p);
  return v.geometry().contains(i) ? v.at(i) : background;
}

/// Samples `v` at every voxel center of `target`.
Volume resample(const Volume& v, const Geometry& target, Interp mode = Interp::trilinear,
                float background = kCtBackground);
Mask resample(const Mask& m, const Geometry& target);

}  // namespace gtvseg
