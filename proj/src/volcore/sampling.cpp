#include "gtvseg/volcore/sampling.hpp"

namespace gtvseg {
namespace {

constexpr double kEdgeTolerance = 1e-6;

// Splits continuous coordinate u into a base index and weight; false when outside.
bool locate(double u, int dim, int& base, double& frac) {
  if (u < -kEdgeTolerance || u > (dim - 1) + kEdgeTolerance) return false;
  if (dim == 1) {
    base = 0;
    frac = 0.0;
    return true;
  }
  double f = std::floor(u);
  int b = static_cast<int>(f);
  if (b < 0) {
    b = 0;
    f = 0.0;
  }
  if (b > dim - 2) b = dim - 2;
  base = b;
  frac = std::clamp(u - b, 0.0, 1.0);
  return true;
}

}  // namespace

float sample_trilinear(const Volume& v, Vec3 p, float background) {
  const Geometry& g = v.geometry();
  const Vec3 u = g.world_to_voxel(p);
  int i0, j0, k0;
  double fx, fy, fz;
  if (!locate(u.x, g.dims.x, i0, fx) || !locate(u.y, g.dims.y, j0, fy) ||
      !locate(u.z, g.dims.z, k0, fz)) {
    return background;
  }
  const int i1 = std::min(i0 + 1, g.dims.x - 1);
  const int j1 = std::min(j0 + 1, g.dims.y - 1);
  const int k1 = std::min(k0 + 1, g.dims.z - 1);
  const double c00 = v.at(i0, j0, k0) * (1 - fx) + v.at(i1, j0, k0) * fx;
  const double c10 = v.at(i0, j1, k0) * (1 - fx) + v.at(i1, j1, k0) * fx;
  const double c01 = v.at(i0, j0, k1) * (1 - fx) + v.at(i1, j0, k1) * fx;
  const double c11 = v.at(i0, j1, k1) * (1 - fx) + v.at(i1, j1, k1) * fx;
  const double c0 = c00 * (1 - fy) + c10 * fy;
  const double c1 = c01 * (1 - fy) + c11 * fy;
  return static_cast<float>(c0 * (1 - fz) + c1 * fz);
}

Volume resample(const Volume& v, const Geometry& target, Interp mode, float background) {
  Volume out(target);
  for (int k = 0; k < target.dims.z; ++k) {
    for (int j = 0; j < target.dims.y; ++j) {
      for (int i = 0; i < target.dims.x; ++i) {
        const Vec3 p = target.voxel_to_world(Index3{i, j, k});
        out.at(i, j, k) = mode == Interp::trilinear ? sample_trilinear(v, p, background)
                                                    : sample_nearest(v, p, background);
      }
    }
  }
  return out;
}

Mask resample(const Mask& m, const Geometry& target) {
  Mask out(target);
  for (int k = 0; k < target.dims.z; ++k) {
    for (int j = 0; j < target.dims.y; ++j) {
      for (int i = 0; i < target.dims.x; ++i) {
        out.at(i, j, k) =
            sample_nearest(m, target.voxel_to_world(Index3{i, j, k}), std::uint8_t{0});
      }
    }
  }
  return out;
}

}  // namespace gtvseg
