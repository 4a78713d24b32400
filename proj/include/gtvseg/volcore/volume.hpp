#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "gtvseg/volcore/geometry.hpp"

namespace gtvseg {

/// Dense x-fastest voxel array with physical placement.
template <typename T>
class Image {
 public:
  using value_type = T;

  Image() = default;
  explicit Image(Geometry geometry, T fill = T{}) : geometry_(geometry) {
    geometry_.validate();
    data_.assign(geometry_.voxel_count(), fill);
  }
  Image(Geometry geometry, std::vector<T> data) : geometry_(geometry), data_(std::move(data)) {
    geometry_.validate();
    if (data_.size() != geometry_.voxel_count()) {
      throw Error("image data length " + std::to_string(data_.size()) +
                  " does not match geometry " + to_string(geometry_));
    }
  }

  const Geometry& geometry() const { return geometry_; }
  const Index3& dims() const { return geometry_.dims; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  std::span<const T> data() const { return data_; }
  std::span<T> data() { return data_; }
  const std::vector<T>& values() const { return data_; }

  T operator[](std::size_t n) const { return data_[n]; }
  T& operator[](std::size_t n) { return data_[n]; }
  T at(int i, int j, int k) const { return data_[geometry_.linear(i, j, k)]; }
  T& at(int i, int j, int k) { return data_[geometry_.linear(i, j, k)]; }
  T at(Index3 i) const { return data_[geometry_.linear(i)]; }
  T& at(Index3 i) { return data_[geometry_.linear(i)]; }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  Geometry geometry_;
  std::vector<T> data_;
};

using Volume = Image<float>;
using Mask = Image<std::uint8_t>;

inline bool all_finite(const Volume& v) {
  return std::all_of(v.data().begin(), v.data().end(), [](float x) { return std::isfinite(x); });
}

inline bool is_binary(const Mask& m) {
  return std::all_of(m.data().begin(), m.data().end(), [](std::uint8_t x) { return x <= 1; });
}

inline std::size_t count_set(const Mask& m) {
  return static_cast<std::size_t>(std::count(m.data().begin(), m.data().end(), std::uint8_t{1}));
}

inline double mask_volume_mm3(const Mask& m) {
  return static_cast<double>(count_set(m)) * m.geometry().voxel_volume();
}

/// Inclusive-exclusive voxel box [lo, hi).
struct Box {
  Index3 lo;
  Index3 hi;
  Index3 extent() const { return hi - lo; }
  bool empty() const { return hi.x <= lo.x || hi.y <= lo.y || hi.z <= lo.z; }
};

/// Bounding box of the set voxels; empty Box when the mask is empty.
Box bounding_box(const Mask& m);

/// Copy of the sub-block [lo, hi). Origin moves to the world center of voxel lo.
template <typename T>
Image<T> crop(const Image<T>& v, Index3 lo, Index3 hi) {
  const Index3 d = v.dims();
  for (int a = 0; a < 3; ++a) {
    if (lo[a] < 0 || hi[a] > d[a] || lo[a] >= hi[a]) {
      throw Error("crop bounds out of range for " + to_string(v.geometry()));
    }
  }
  Geometry g = v.geometry();
  g.dims = hi - lo;
  g.origin = v.geometry().voxel_to_world(lo);
  Image<T> out(g);
  for (int k = 0; k < g.dims.z; ++k) {
    for (int j = 0; j < g.dims.y; ++j) {
      const T* src = &v.data()[v.geometry().linear(lo.x, lo.y + j, lo.z + k)];
      std::copy(src, src + g.dims.x, &out.data()[g.linear(0, j, k)]);
    }
  }
  return out;
}

/// Writes `patch` into `dest` starting at voxel `lo` (inverse of crop).
template <typename T>
void paste(Image<T>& dest, const Image<T>& patch, Index3 lo) {
  const Index3 d = patch.dims();
  for (int k = 0; k < d.z; ++k) {
    for (int j = 0; j < d.y; ++j) {
      const T* src = &patch.data()[patch.geometry().linear(0, j, k)];
      std::copy(src, src + d.x, &dest.data()[dest.geometry().linear(lo.x, lo.y + j, lo.z + k)]);
    }
  }
}

}  // namespace gtvseg
