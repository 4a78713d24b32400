#include "gtvseg/evalx/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace gtvseg::eval {
namespace {

void require_same(const Mask& a, const Mask& b) {
  if (!(a.geometry() == b.geometry())) {
    throw Error("mask geometry mismatch: " + to_string(a.geometry()) + " vs " + to_string(b.geometry()));
  }
}

constexpr double kInf = std::numeric_limits<double>::infinity();

// Felzenszwalb-Huttenlocher lower envelope for f(q) + (w*(p-q))^2 along one line.
void edt_1d(const double* f, int n, double w, double* d, std::vector<int>& v, std::vector<double>& z) {
  v.assign(n, 0);
  z.assign(n + 1, 0.0);
  int k = -1;
  for (int q = 0; q < n; ++q) {
    if (f[q] == kInf) continue;
    if (k < 0) {
      k = 0;
      v[0] = q;
      z[0] = -kInf;
      z[1] = kInf;
      continue;
    }
    double s;
    while (true) {
      const int p = v[k];
      s = ((f[q] + w * w * q * q) - (f[p] + w * w * p * p)) / (2.0 * w * w * (q - p));
      if (s <= z[k]) {
        --k;
        if (k < 0) break;
      } else {
        break;
      }
    }
    ++k;
    v[k] = q;
    z[k] = k == 0 ? -kInf : s;
    z[k + 1] = kInf;
  }
  if (k < 0) {
    std::fill(d, d + n, kInf);
    return;
  }
  int j = 0;
  for (int q = 0; q < n; ++q) {
    while (z[j + 1] < q) ++j;
    const double dq = w * (q - v[j]);
    d[q] = dq * dq + f[v[j]];
  }
}

}  // namespace

double dsc(const Mask& a, const Mask& b) {
  require_same(a, b);
  std::size_t inter = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    na += a[i];
    nb += b[i];
    inter += a[i] & b[i];
  }
  if (na + nb == 0) return 1.0;
  return 2.0 * static_cast<double>(inter) / static_cast<double>(na + nb);
}

Mask surface_mask(const Mask& m) {
  const Geometry& g = m.geometry();
  Mask s(g);
  for (int k = 0; k < g.dims.z; ++k) {
    for (int j = 0; j < g.dims.y; ++j) {
      for (int i = 0; i < g.dims.x; ++i) {
        if (!m.at(i, j, k)) continue;
        const bool boundary = i == 0 || j == 0 || k == 0 || i == g.dims.x - 1 || j == g.dims.y - 1 ||
                              k == g.dims.z - 1 || !m.at(i - 1, j, k) || !m.at(i + 1, j, k) ||
                              !m.at(i, j - 1, k) || !m.at(i, j + 1, k) || !m.at(i, j, k - 1) ||
                              !m.at(i, j, k + 1);
        s.at(i, j, k) = boundary ? 1 : 0;
      }
    }
  }
  return s;
}

std::vector<Vec3> surface(const Mask& m) {
  const Mask s = surface_mask(m);
  std::vector<Vec3> pts;
  for (std::size_t n = 0; n < s.size(); ++n) {
    if (s[n]) pts.push_back(s.geometry().voxel_to_world(s.geometry().unravel(n)));
  }
  return pts;
}

std::vector<double> distance_transform(const Mask& target) {
  const Geometry& g = target.geometry();
  const std::size_t N = g.voxel_count();
  std::vector<double> f(N);
  for (std::size_t n = 0; n < N; ++n) f[n] = target[n] ? 0.0 : kInf;
  std::vector<int> v;
  std::vector<double> z;
  const int maxn = std::max({g.dims.x, g.dims.y, g.dims.z});
  std::vector<double> line(maxn), out(maxn);
  const std::size_t stride[3] = {1, static_cast<std::size_t>(g.dims.x),
                                 static_cast<std::size_t>(g.dims.x) * g.dims.y};
  for (int axis = 0; axis < 3; ++axis) {
    const int n = g.dims[axis];
    for (std::size_t base = 0; base < N; ++base) {
      // Visit each line once, from its first voxel along `axis`.
      if (g.unravel(base)[axis] != 0) continue;
      for (int q = 0; q < n; ++q) line[q] = f[base + q * stride[axis]];
      edt_1d(line.data(), n, g.spacing[axis], out.data(), v, z);
      for (int q = 0; q < n; ++q) f[base + q * stride[axis]] = out[q];
    }
  }
  for (auto& x : f) x = std::sqrt(x);
  return f;
}

std::vector<double> directed_surface_distances(const Mask& from, const Mask& to) {
  require_same(from, to);
  const Mask sf = surface_mask(from);
  const std::vector<double> dt = distance_transform(surface_mask(to));
  std::vector<double> out;
  for (std::size_t n = 0; n < sf.size(); ++n) {
    if (sf[n]) out.push_back(dt[n]);
  }
  return out;
}

double percentile_linear(std::vector<double> values, double q) {
  if (values.empty()) throw Error("percentile of an empty list");
  std::sort(values.begin(), values.end());
  const double h = (values.size() - 1) * q;
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= values.size()) return values.back();
  return values[lo] + (h - static_cast<double>(lo)) * (values[lo + 1] - values[lo]);
}

std::optional<double> hd95(const Mask& a, const Mask& b, Hd95Mode mode) {
  auto ab = directed_surface_distances(a, b);
  auto ba = directed_surface_distances(b, a);
  if (ab.empty() || ba.empty()) return std::nullopt;
  if (mode == Hd95Mode::max_of_directed) {
    return std::max(percentile_linear(ab, 0.95), percentile_linear(ba, 0.95));
  }
  ab.insert(ab.end(), ba.begin(), ba.end());
  return percentile_linear(std::move(ab), 0.95);
}

std::optional<double> asd(const Mask& a, const Mask& b) {
  const auto ab = directed_surface_distances(a, b);
  const auto ba = directed_surface_distances(b, a);
  if (ab.empty() || ba.empty()) return std::nullopt;
  const double sum = std::accumulate(ab.begin(), ab.end(), 0.0) + std::accumulate(ba.begin(), ba.end(), 0.0);
  return sum / static_cast<double>(ab.size() + ba.size());
}

}  // namespace gtvseg::eval
