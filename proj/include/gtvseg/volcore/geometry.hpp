#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace gtvseg {

/// Base exception for every recoverable failure in the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr double operator[](int axis) const { return axis == 0 ? x : (axis == 1 ? y : z); }
  constexpr double& operator[](int axis) { return axis == 0 ? x : (axis == 1 ? y : z); }

  friend constexpr Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend constexpr Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend constexpr Vec3 operator-(Vec3 a) { return {-a.x, -a.y, -a.z}; }
  friend constexpr Vec3 operator*(Vec3 a, double s) { return {a.x * s, a.y * s, a.z * s}; }
  friend constexpr Vec3 operator*(double s, Vec3 a) { return a * s; }
  friend constexpr Vec3 operator/(Vec3 a, double s) { return {a.x / s, a.y / s, a.z / s}; }
  friend constexpr bool operator==(Vec3 a, Vec3 b) = default;

  double norm() const { return std::sqrt(x * x + y * y + z * z); }
};

// Component-wise product / quotient, used for index <-> world conversions.
constexpr Vec3 hadamard(Vec3 a, Vec3 b) { return {a.x * b.x, a.y * b.y, a.z * b.z}; }
constexpr Vec3 divide(Vec3 a, Vec3 b) { return {a.x / b.x, a.y / b.y, a.z / b.z}; }

struct Index3 {
  int x = 0;
  int y = 0;
  int z = 0;

  constexpr int operator[](int axis) const { return axis == 0 ? x : (axis == 1 ? y : z); }
  constexpr int& operator[](int axis) { return axis == 0 ? x : (axis == 1 ? y : z); }
  friend constexpr bool operator==(Index3 a, Index3 b) = default;
  friend constexpr Index3 operator+(Index3 a, Index3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend constexpr Index3 operator-(Index3 a, Index3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
};

/// Voxel grid placement. Voxel (i,j,k) has its center at origin + (i,j,k)*spacing.
struct Geometry {
  Index3 dims{1, 1, 1};
  Vec3 spacing{1.0, 1.0, 1.0};
  Vec3 origin{};

  /// Throws Error if any dim < 1 or any spacing is not a positive finite number.
  void validate() const;

  std::size_t voxel_count() const {
    return static_cast<std::size_t>(dims.x) * static_cast<std::size_t>(dims.y) *
           static_cast<std::size_t>(dims.z);
  }
  double voxel_volume() const { return spacing.x * spacing.y * spacing.z; }

  bool contains(Index3 i) const {
    return i.x >= 0 && i.y >= 0 && i.z >= 0 && i.x < dims.x && i.y < dims.y && i.z < dims.z;
  }
  std::size_t linear(int i, int j, int k) const {
    return (static_cast<std::size_t>(k) * static_cast<std::size_t>(dims.y) +
            static_cast<std::size_t>(j)) *
               static_cast<std::size_t>(dims.x) +
           static_cast<std::size_t>(i);
  }
  std::size_t linear(Index3 i) const { return linear(i.x, i.y, i.z); }
  Index3 unravel(std::size_t n) const {
    const auto nx = static_cast<std::size_t>(dims.x);
    const auto ny = static_cast<std::size_t>(dims.y);
    return {static_cast<int>(n % nx), static_cast<int>((n / nx) % ny),
            static_cast<int>(n / (nx * ny))};
  }

  Vec3 voxel_to_world(Vec3 continuous_index) const {
    return origin + hadamard(continuous_index, spacing);
  }
  Vec3 voxel_to_world(Index3 i) const {
    return voxel_to_world(Vec3{static_cast<double>(i.x), static_cast<double>(i.y),
                               static_cast<double>(i.z)});
  }
  /// Continuous voxel coordinate of a world point.
  Vec3 world_to_voxel(Vec3 p) const { return divide(p - origin, spacing); }
  /// Nearest voxel index (may lie outside the grid).
  Index3 nearest_voxel(Vec3 p) const;

  friend bool operator==(const Geometry&, const Geometry&) = default;
};

std::string to_string(const Geometry& g);

}  // namespace gtvseg
