#include "gtvseg/registration/field.hpp"

#include <span>

#include "gtvseg/volcore/io.hpp"

namespace gtvseg::reg {

DeformationField::DeformationField(const Geometry& geometry)
    : geometry_(geometry),
      dx_(geometry.voxel_count(), 0.0f),
      dy_(geometry.voxel_count(), 0.0f),
      dz_(geometry.voxel_count(), 0.0f) {
  geometry_.validate();
}

DeformationField::DeformationField(const Geometry& geometry, std::vector<float> dx,
                                   std::vector<float> dy, std::vector<float> dz)
    : geometry_(geometry), dx_(std::move(dx)), dy_(std::move(dy)), dz_(std::move(dz)) {
  geometry_.validate();
  const std::size_t n = geometry_.voxel_count();
  if (dx_.size() != n || dy_.size() != n || dz_.size() != n) {
    throw Error("deformation field channels do not match geometry " + to_string(geometry_));
  }
  if (!all_finite()) throw Error("deformation field has non-finite displacement");
}

DeformationField DeformationField::constant(const Geometry& geometry, Vec3 d) {
  DeformationField f(geometry);
  for (std::size_t n = 0; n < f.size(); ++n) f.set(n, d);
  return f;
}

Vec3 DeformationField::interpolate(Vec3 p) const {
  const Vec3 u = geometry_.world_to_voxel(p);
  int base[3];
  double frac[3];
  for (int a = 0; a < 3; ++a) {
    const int dim = geometry_.dims[a];
    const double c = std::clamp(u[a], 0.0, static_cast<double>(dim - 1));
    int b = static_cast<int>(std::floor(c));
    if (b > dim - 2) b = std::max(0, dim - 2);
    base[a] = b;
    frac[a] = dim == 1 ? 0.0 : c - b;
  }
  Vec3 out{};
  for (int dz = 0; dz < 2; ++dz) {
    const double wz = dz ? frac[2] : 1.0 - frac[2];
    const int k = std::min(base[2] + dz, geometry_.dims.z - 1);
    for (int dy = 0; dy < 2; ++dy) {
      const double wy = dy ? frac[1] : 1.0 - frac[1];
      const int j = std::min(base[1] + dy, geometry_.dims.y - 1);
      for (int dx = 0; dx < 2; ++dx) {
        const double wx = dx ? frac[0] : 1.0 - frac[0];
        const int i = std::min(base[0] + dx, geometry_.dims.x - 1);
        const double w = wx * wy * wz;
        if (w == 0.0) continue;
        out = out + at(geometry_.linear(i, j, k)) * w;
      }
    }
  }
  return out;
}

bool DeformationField::all_finite() const {
  for (const auto* c : {&dx_, &dy_, &dz_}) {
    for (float v : *c) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

Volume apply_field(const DeformationField& f, const Volume& v, Interp mode, float background) {
  const Geometry& g = f.geometry();
  Volume out(g);
  for (std::size_t n = 0; n < out.size(); ++n) {
    const Vec3 p = g.voxel_to_world(g.unravel(n)) + f.at(n);
    out[n] = mode == Interp::trilinear ? sample_trilinear(v, p, background)
                                       : sample_nearest(v, p, background);
  }
  return out;
}

Mask apply_field(const DeformationField& f, const Mask& m) {
  const Geometry& g = f.geometry();
  Mask out(g);
  for (std::size_t n = 0; n < out.size(); ++n) {
    out[n] = sample_nearest(m, g.voxel_to_world(g.unravel(n)) + f.at(n), std::uint8_t{0});
  }
  return out;
}

double mean_endpoint_error(const DeformationField& a, const DeformationField& b,
                           const Mask* region) {
  if (!(a.geometry() == b.geometry())) throw Error("endpoint error: field geometries differ");
  if (region && !(region->geometry() == a.geometry())) {
    throw Error("endpoint error: region geometry differs from field");
  }
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t n = 0; n < a.size(); ++n) {
    if (region && !(*region)[n]) continue;
    sum += (a.at(n) - b.at(n)).norm();
    ++count;
  }
  if (count == 0) throw Error("endpoint error: empty region");
  return sum / static_cast<double>(count);
}

void save_field(const DeformationField& f, const std::filesystem::path& path) {
  const std::span<const float> channels[3] = {f.component(0), f.component(1), f.component(2)};
  save_channels(path, f.geometry(), channels);
}

DeformationField load_field(const std::filesystem::path& path) {
  Geometry g;
  auto data = load_channels(path, 3, &g);
  const std::size_t n = g.voxel_count();
  std::vector<float> dx(data.begin(), data.begin() + static_cast<std::ptrdiff_t>(n));
  std::vector<float> dy(data.begin() + static_cast<std::ptrdiff_t>(n),
                        data.begin() + static_cast<std::ptrdiff_t>(2 * n));
  std::vector<float> dz(data.begin() + static_cast<std::ptrdiff_t>(2 * n), data.end());
  return DeformationField(g, std::move(dx), std::move(dy), std::move(dz));
}

}  // namespace gtvseg::reg
