#include "gtvseg/registration/lungs.hpp"

#include <algorithm>
#include <numeric>

#include "gtvseg/volcore/components.hpp"

namespace gtvseg::reg {

Mask segment_lungs(const Volume& ct) {
  const Index3 d = ct.dims();
  const Components c = label_components(threshold(ct, kLungThresholdHu, /*below=*/true));
  std::vector<int> candidates;
  for (std::size_t n = 0; n < c.count(); ++n) {
    const Box& b = c.boxes[n];
    const bool touches_xy = b.lo.x == 0 || b.lo.y == 0 || b.hi.x == d.x || b.hi.y == d.y;
    if (!touches_xy) candidates.push_back(static_cast<int>(n + 1));
  }
  if (candidates.size() < 2) {
    throw Error("lung segmentation found " + std::to_string(candidates.size()) +
                " lung-like component(s), need two");
  }
  std::stable_sort(candidates.begin(), candidates.end(), [&](int a, int b) {
    return c.sizes[static_cast<std::size_t>(a - 1)] > c.sizes[static_cast<std::size_t>(b - 1)];
  });
  candidates.resize(2);
  return fill_holes_per_slice(select_components(c, candidates));
}

Vec3 mass_center(const Mask& m) {
  const Geometry& g = m.geometry();
  long long sx = 0, sy = 0, sz = 0, n = 0;
  for (int k = 0; k < g.dims.z; ++k) {
    for (int j = 0; j < g.dims.y; ++j) {
      for (int i = 0; i < g.dims.x; ++i) {
        if (!m.at(i, j, k)) continue;
        sx += i;
        sy += j;
        sz += k;
        ++n;
      }
    }
  }
  if (n == 0) throw Error("mass center of an empty mask");
  const double inv = 1.0 / static_cast<double>(n);
  return g.voxel_to_world(Vec3{static_cast<double>(sx) * inv, static_cast<double>(sy) * inv,
                               static_cast<double>(sz) * inv});
}

Vec3 rigid_init(const Mask& fixed_lungs, const Mask& moving_lungs) {
  return mass_center(moving_lungs) - mass_center(fixed_lungs);
}

}  // namespace gtvseg::reg
