#pragma once

#include <filesystem>
#include <vector>

#include "gtvseg/volcore/sampling.hpp"
#include "gtvseg/volcore/volume.hpp"

namespace gtvseg::reg {

/// Dense pull-back displacement field in mm on the fixed grid: the moving
/// image is sampled at x + disp(x) for every fixed voxel center x.
class DeformationField {
 public:
  DeformationField() = default;
  explicit DeformationField(const Geometry& geometry);
  DeformationField(const Geometry& geometry, std::vector<float> dx, std::vector<float> dy,
                   std::vector<float> dz);

  /// Constant displacement everywhere.
  static DeformationField constant(const Geometry& geometry, Vec3 d);

  const Geometry& geometry() const { return geometry_; }
  std::size_t size() const { return dx_.size(); }

  Vec3 at(std::size_t n) const { return {dx_[n], dy_[n], dz_[n]}; }
  Vec3 at(Index3 i) const { return at(geometry_.linear(i)); }
  void set(std::size_t n, Vec3 d) {
    dx_[n] = static_cast<float>(d.x);
    dy_[n] = static_cast<float>(d.y);
    dz_[n] = static_cast<float>(d.z);
  }

  /// Trilinear displacement at an arbitrary world point, edge-clamped.
  Vec3 interpolate(Vec3 p) const;

  const std::vector<float>& component(int axis) const {
    return axis == 0 ? dx_ : (axis == 1 ? dy_ : dz_);
  }

  bool all_finite() const;
  friend bool operator==(const DeformationField&, const DeformationField&) = default;

 private:
  Geometry geometry_;
  std::vector<float> dx_, dy_, dz_;
};

/// Warps `v` onto f.geometry(): out(x) = v(x + disp(x)).
Volume apply_field(const DeformationField& f, const Volume& v, Interp mode = Interp::trilinear,
                   float background = kCtBackground);
Mask apply_field(const DeformationField& f, const Mask& m);

/// Mean |a(x) - b(x)| over the voxels of `region` (all voxels when null).
double mean_endpoint_error(const DeformationField& a, const DeformationField& b,
                           const Mask* region = nullptr);

/// Three consecutive f32 channel blocks (dx, dy, dz) in the interchange format.
void save_field(const DeformationField& f, const std::filesystem::path& path);
DeformationField load_field(const std::filesystem::path& path);

}  // namespace gtvseg::reg
