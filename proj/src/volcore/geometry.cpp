#include "gtvseg/volcore/geometry.hpp"

#include <sstream>

#include "gtvseg/volcore/volume.hpp"

namespace gtvseg {

void Geometry::validate() const {
  for (int a = 0; a < 3; ++a) {
    if (dims[a] < 1) throw Error("geometry dims must be >= 1, got " + to_string(*this));
    if (!(spacing[a] > 0.0) || !std::isfinite(spacing[a])) {
      throw Error("geometry spacing must be positive, got " + to_string(*this));
    }
    if (!std::isfinite(origin[a])) throw Error("geometry origin must be finite");
  }
}

Index3 Geometry::nearest_voxel(Vec3 p) const {
  const Vec3 u = world_to_voxel(p);
  return {static_cast<int>(std::floor(u.x + 0.5)), static_cast<int>(std::floor(u.y + 0.5)),
          static_cast<int>(std::floor(u.z + 0.5))};
}

std::string to_string(const Geometry& g) {
  std::ostringstream os;
  os << "dims=" << g.dims.x << 'x' << g.dims.y << 'x' << g.dims.z << " spacing=" << g.spacing.x
     << ',' << g.spacing.y << ',' << g.spacing.z << " origin=" << g.origin.x << ','
     << g.origin.y << ',' << g.origin.z;
  return os.str();
}

Box bounding_box(const Mask& m) {
  const Geometry& g = m.geometry();
  Box box{{g.dims.x, g.dims.y, g.dims.z}, {0, 0, 0}};
  bool any = false;
  for (int k = 0; k < g.dims.z; ++k) {
    for (int j = 0; j < g.dims.y; ++j) {
      for (int i = 0; i < g.dims.x; ++i) {
        if (!m.at(i, j, k)) continue;
        any = true;
        box.lo = {std::min(box.lo.x, i), std::min(box.lo.y, j), std::min(box.lo.z, k)};
        box.hi = {std::max(box.hi.x, i + 1), std::max(box.hi.y, j + 1), std::max(box.hi.z, k + 1)};
      }
    }
  }
  if (!any) return Box{};
  return box;
}

}  // namespace gtvseg
