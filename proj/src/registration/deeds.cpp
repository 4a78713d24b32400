#include "gtvseg/registration/deeds.hpp"

#include <algorithm>
#include <limits>

#include "gtvseg/volcore/parallel.hpp"

namespace gtvseg::reg {

void RegParams::validate() const {
  if (levels < 1) throw Error("registration needs levels >= 1");
  if (block < 1) throw Error("registration block edge must be >= 1");
  if (static_cast<int>(search_radius_mm.size()) != levels ||
      static_cast<int>(quant_mm.size()) != levels) {
    throw Error("registration needs one search radius and one quantisation per level");
  }
  for (int l = 0; l < levels; ++l) {
    if (!(search_radius_mm[l] > 0) || !(quant_mm[l] > 0)) {
      throw Error("registration radii and quantisation must be positive");
    }
    if (quant_mm[l] > search_radius_mm[l]) {
      throw Error("registration quantisation exceeds search radius at level " +
                  std::to_string(l));
    }
  }
  if (alpha < 0) throw Error("registration alpha must be non-negative");
  if (smoothing_sweeps < 0) throw Error("registration smoothing sweeps must be >= 0");
  if (!(intensity_scale > 0)) throw Error("registration intensity scale must be positive");
}

Volume downsample_box(const Volume& v, int factor) {
  if (factor < 1) throw Error("downsample factor must be >= 1");
  if (factor == 1) return v;
  const Geometry& src = v.geometry();
  Geometry g;
  for (int a = 0; a < 3; ++a) {
    g.dims[a] = (src.dims[a] + factor - 1) / factor;
    g.spacing[a] = src.spacing[a] * factor;
    g.origin[a] = src.origin[a] + 0.5 * (factor - 1) * src.spacing[a];
  }
  Volume out(g);
  for (int k = 0; k < g.dims.z; ++k) {
    for (int j = 0; j < g.dims.y; ++j) {
      for (int i = 0; i < g.dims.x; ++i) {
        double sum = 0.0;
        int count = 0;
        for (int kk = k * factor; kk < std::min((k + 1) * factor, src.dims.z); ++kk) {
          for (int jj = j * factor; jj < std::min((j + 1) * factor, src.dims.y); ++jj) {
            for (int ii = i * factor; ii < std::min((i + 1) * factor, src.dims.x); ++ii) {
              sum += v.at(ii, jj, kk);
              ++count;
            }
          }
        }
        out.at(i, j, k) = static_cast<float>(sum / count);
      }
    }
  }
  return out;
}

namespace {

// Trilinear lookup by continuous voxel index, with a background outside [0, dim-1].
struct RawSampler {
  const float* data;
  int nx, ny, nz;
  float background;

  float operator()(double u, double v, double w) const {
    constexpr double tol = 1e-6;
    if (u < -tol || v < -tol || w < -tol || u > nx - 1 + tol || v > ny - 1 + tol ||
        w > nz - 1 + tol) {
      return background;
    }
    int i = nx > 1 ? std::clamp(static_cast<int>(std::floor(u)), 0, nx - 2) : 0;
    int j = ny > 1 ? std::clamp(static_cast<int>(std::floor(v)), 0, ny - 2) : 0;
    int k = nz > 1 ? std::clamp(static_cast<int>(std::floor(w)), 0, nz - 2) : 0;
    const float fx = nx > 1 ? static_cast<float>(std::clamp(u - i, 0.0, 1.0)) : 0.0f;
    const float fy = ny > 1 ? static_cast<float>(std::clamp(v - j, 0.0, 1.0)) : 0.0f;
    const float fz = nz > 1 ? static_cast<float>(std::clamp(w - k, 0.0, 1.0)) : 0.0f;
    const std::size_t sx = nx > 1 ? 1 : 0;
    const std::size_t sy = ny > 1 ? static_cast<std::size_t>(nx) : 0;
    const std::size_t sz = nz > 1 ? static_cast<std::size_t>(nx) * ny : 0;
    const float* p = data + (static_cast<std::size_t>(k) * ny + j) * nx + i;
    const float c00 = p[0] + fx * (p[sx] - p[0]);
    const float c10 = p[sy] + fx * (p[sy + sx] - p[sy]);
    const float c01 = p[sz] + fx * (p[sz + sx] - p[sz]);
    const float c11 = p[sz + sy] + fx * (p[sz + sy + sx] - p[sz + sy]);
    const float c0 = c00 + fy * (c10 - c00);
    const float c1 = c01 + fy * (c11 - c01);
    return c0 + fz * (c1 - c0);
  }
};

struct Candidates {
  std::vector<Vec3> offsets;  // mm, ordered by length so ties prefer small moves
};

Candidates make_candidates(double radius, double quant) {
  const int steps = static_cast<int>(std::floor(radius / quant + 1e-9));
  Candidates c;
  for (int k = -steps; k <= steps; ++k) {
    for (int j = -steps; j <= steps; ++j) {
      for (int i = -steps; i <= steps; ++i) c.offsets.push_back(Vec3{i * quant, j * quant, k * quant});
    }
  }
  std::stable_sort(c.offsets.begin(), c.offsets.end(), [](Vec3 a, Vec3 b) {
    return a.x * a.x + a.y * a.y + a.z * a.z < b.x * b.x + b.y * b.y + b.z * b.z;
  });
  return c;
}

}  // namespace

DeformationField deeds_register(const Volume& fixed, const Volume& moving, Vec3 init,
                                const RegParams& params) {
  params.validate();
  for (int a = 0; a < 3; ++a) {
    if (fixed.dims()[a] < params.block) {
      throw Error("registration: fixed image dimension " + std::to_string(fixed.dims()[a]) +
                  " is smaller than the block edge " + std::to_string(params.block));
    }
  }

  DeformationField previous;
  bool have_previous = false;
  const int B = params.block;

  for (int level = 0; level < params.levels; ++level) {
    const int factor = 1 << (params.levels - 1 - level);
    const Volume F = downsample_box(fixed, factor);
    const Volume M = downsample_box(moving, factor);
    const Geometry& g = F.geometry();
    const Geometry& gm = M.geometry();
    const std::size_t nvox = g.voxel_count();

    // Prior displacement and its moving-space continuous index per voxel.
    std::vector<Vec3> prior(nvox);
    std::vector<Vec3> base(nvox);
    for (std::size_t n = 0; n < nvox; ++n) {
      const Vec3 x = g.voxel_to_world(g.unravel(n));
      prior[n] = have_previous ? previous.interpolate(x) : init;
      base[n] = gm.world_to_voxel(x + prior[n]);
    }

    const Candidates cand = make_candidates(params.search_radius_mm[level], params.quant_mm[level]);
    const std::size_t K = cand.offsets.size();
    std::vector<Vec3> step(K);
    for (std::size_t c = 0; c < K; ++c) step[c] = divide(cand.offsets[c], gm.spacing);

    const Index3 nb{(g.dims.x + B - 1) / B, (g.dims.y + B - 1) / B, (g.dims.z + B - 1) / B};
    const std::size_t nblocks = static_cast<std::size_t>(nb.x) * nb.y * nb.z;
    const RawSampler sample{M.data().data(), gm.dims.x, gm.dims.y, gm.dims.z, kCtBackground};
    const float inv_scale = static_cast<float>(1.0 / params.intensity_scale);

    std::vector<float> cost(nblocks * K);
    parallel_for(nblocks, params.threads, [&](std::size_t b) {
      const int bi = static_cast<int>(b % nb.x);
      const int bj = static_cast<int>((b / nb.x) % nb.y);
      const int bk = static_cast<int>(b / (static_cast<std::size_t>(nb.x) * nb.y));
      std::vector<std::size_t> voxels;
      for (int k = bk * B; k < std::min((bk + 1) * B, g.dims.z); ++k) {
        for (int j = bj * B; j < std::min((bj + 1) * B, g.dims.y); ++j) {
          for (int i = bi * B; i < std::min((bi + 1) * B, g.dims.x); ++i) {
            voxels.push_back(g.linear(i, j, k));
          }
        }
      }
      const float inv_count = 1.0f / static_cast<float>(voxels.size());
      for (std::size_t c = 0; c < K; ++c) {
        const Vec3 s = step[c];
        float sum = 0.0f;
        for (std::size_t n : voxels) {
          const float diff = (F[n] - sample(base[n].x + s.x, base[n].y + s.y, base[n].z + s.z)) *
                             inv_scale;
          sum += diff * diff;
        }
        cost[b * K + c] = sum * inv_count;
      }
    });

    // Regularised choice per block: synchronous sweeps against neighbour means.
    std::vector<std::size_t> choice(nblocks);
    for (std::size_t b = 0; b < nblocks; ++b) {
      const float* cb = &cost[b * K];
      choice[b] = static_cast<std::size_t>(std::min_element(cb, cb + K) - cb);
    }
    const double q = params.quant_mm[level];
    for (int sweep = 0; sweep < params.smoothing_sweeps && params.alpha > 0; ++sweep) {
      std::vector<std::size_t> next(nblocks);
      for (std::size_t b = 0; b < nblocks; ++b) {
        const Index3 bb{static_cast<int>(b % nb.x), static_cast<int>((b / nb.x) % nb.y),
                        static_cast<int>(b / (static_cast<std::size_t>(nb.x) * nb.y))};
        Vec3 mean{};
        int count = 0;
        for (int a = 0; a < 3; ++a) {
          for (int s : {-1, 1}) {
            Index3 o = bb;
            o[a] += s;
            if (o[a] < 0 || o[a] >= nb[a]) continue;
            mean = mean + cand.offsets[choice[(static_cast<std::size_t>(o.z) * nb.y + o.y) * nb.x + o.x]];
            ++count;
          }
        }
        if (count == 0) {
          next[b] = choice[b];
          continue;
        }
        mean = mean / count;
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_c = 0;
        for (std::size_t c = 0; c < K; ++c) {
          const Vec3 dev = (cand.offsets[c] - mean) / q;
          const double e = cost[b * K + c] + params.alpha * (dev.x * dev.x + dev.y * dev.y + dev.z * dev.z);
          if (e < best) {
            best = e;
            best_c = c;
          }
        }
        next[b] = best_c;
      }
      choice.swap(next);
    }

    // One 3x3x3 box pass over the block grid (edge blocks average what exists).
    std::vector<Vec3> offset(nblocks);
    for (int bk = 0; bk < nb.z; ++bk) {
      for (int bj = 0; bj < nb.y; ++bj) {
        for (int bi = 0; bi < nb.x; ++bi) {
          Vec3 sum{};
          int count = 0;
          for (int dk = -1; dk <= 1; ++dk) {
            for (int dj = -1; dj <= 1; ++dj) {
              for (int di = -1; di <= 1; ++di) {
                const int i = bi + di, j = bj + dj, k = bk + dk;
                if (i < 0 || j < 0 || k < 0 || i >= nb.x || j >= nb.y || k >= nb.z) continue;
                sum = sum + cand.offsets[choice[(static_cast<std::size_t>(k) * nb.y + j) * nb.x + i]];
                ++count;
              }
            }
          }
          offset[(static_cast<std::size_t>(bk) * nb.y + bj) * nb.x + bi] = sum / count;
        }
      }
    }

    // Block offsets live at nominal block centers; interpolate onto the level grid.
    Geometry block_geometry;
    block_geometry.dims = nb;
    block_geometry.spacing = g.spacing * static_cast<double>(B);
    block_geometry.origin = g.origin + g.spacing * (0.5 * (B - 1));
    std::vector<float> ox(nblocks), oy(nblocks), oz(nblocks);
    for (std::size_t b = 0; b < nblocks; ++b) {
      ox[b] = static_cast<float>(offset[b].x);
      oy[b] = static_cast<float>(offset[b].y);
      oz[b] = static_cast<float>(offset[b].z);
    }
    const DeformationField block_field(block_geometry, std::move(ox), std::move(oy), std::move(oz));

    DeformationField level_field(g);
    for (std::size_t n = 0; n < nvox; ++n) {
      const Vec3 x = g.voxel_to_world(g.unravel(n));
      level_field.set(n, prior[n] + block_field.interpolate(x));
    }
    previous = std::move(level_field);
    have_previous = true;
  }

  // The finest level runs at factor 1, so this is already on the fixed grid.
  return previous;
}

}  // namespace gtvseg::reg
