#include "gtvseg/volcore/components.hpp"

#include <algorithm>

namespace gtvseg {

Components label_components(const Mask& m) {
  const Geometry& g = m.geometry();
  Components c{Image<std::int32_t>(g, 0), {}, {}};
  std::vector<std::size_t> stack;
  constexpr int kOffsets[6][3] = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0},
                                  {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
  for (std::size_t seed = 0; seed < m.size(); ++seed) {
    if (!m[seed] || c.labels[seed] != 0) continue;
    const auto label = static_cast<std::int32_t>(c.sizes.size() + 1);
    std::size_t size = 0;
    const Index3 s = g.unravel(seed);
    Box box{s, s + Index3{1, 1, 1}};
    c.labels[seed] = label;
    stack.push_back(seed);
    while (!stack.empty()) {
      const std::size_t n = stack.back();
      stack.pop_back();
      ++size;
      const Index3 p = g.unravel(n);
      box.lo = {std::min(box.lo.x, p.x), std::min(box.lo.y, p.y), std::min(box.lo.z, p.z)};
      box.hi = {std::max(box.hi.x, p.x + 1), std::max(box.hi.y, p.y + 1),
                std::max(box.hi.z, p.z + 1)};
      for (const auto& o : kOffsets) {
        const Index3 q{p.x + o[0], p.y + o[1], p.z + o[2]};
        if (!g.contains(q)) continue;
        const std::size_t nq = g.linear(q);
        if (m[nq] && c.labels[nq] == 0) {
          c.labels[nq] = label;
          stack.push_back(nq);
        }
      }
    }
    c.sizes.push_back(size);
    c.boxes.push_back(box);
  }
  return c;
}

Mask select_components(const Components& c, const std::vector<int>& keep) {
  std::vector<std::uint8_t> lut(c.count() + 1, 0);
  for (int label : keep) {
    if (label >= 1 && static_cast<std::size_t>(label) <= c.count()) lut[label] = 1;
  }
  Mask out(c.labels.geometry());
  for (std::size_t n = 0; n < out.size(); ++n) out[n] = lut[c.labels[n]];
  return out;
}

Mask fill_holes_per_slice(const Mask& m) {
  const Geometry& g = m.geometry();
  Mask out = m;
  const int nx = g.dims.x;
  const int ny = g.dims.y;
  std::vector<std::uint8_t> outside(static_cast<std::size_t>(nx) * ny);
  std::vector<int> stack;
  for (int k = 0; k < g.dims.z; ++k) {
    std::fill(outside.begin(), outside.end(), 0);
    auto push = [&](int i, int j) {
      const int n = j * nx + i;
      if (!m.at(i, j, k) && !outside[n]) {
        outside[n] = 1;
        stack.push_back(n);
      }
    };
    for (int i = 0; i < nx; ++i) {
      push(i, 0);
      push(i, ny - 1);
    }
    for (int j = 0; j < ny; ++j) {
      push(0, j);
      push(nx - 1, j);
    }
    while (!stack.empty()) {
      const int n = stack.back();
      stack.pop_back();
      const int i = n % nx;
      const int j = n / nx;
      if (i > 0) push(i - 1, j);
      if (i < nx - 1) push(i + 1, j);
      if (j > 0) push(i, j - 1);
      if (j < ny - 1) push(i, j + 1);
    }
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        if (!outside[j * nx + i]) out.at(i, j, k) = 1;
      }
    }
  }
  return out;
}

Mask threshold(const Volume& v, float level, bool below) {
  Mask out(v.geometry());
  for (std::size_t n = 0; n < v.size(); ++n) {
    out[n] = below ? (v[n] < level) : (v[n] >= level);
  }
  return out;
}

}  // namespace gtvseg
