#include "gtvseg/pipeline/augment.hpp"

#include <cmath>
#include <numbers>

namespace gtvseg::pipeline {

AugParams draw_aug(const AugConfig& cfg, Rng& rng) {
  AugParams a;
  if (!cfg.enabled) return a;
  a.flip = cfg.flip && rng.bernoulli(0.5);
  a.angle_deg = rng.uniform(-cfg.rot_deg, cfg.rot_deg);
  a.scale = rng.uniform(cfg.scale_lo, cfg.scale_hi);
  a.noise_var = rng.uniform(0.0, cfg.noise_var_max);
  return a;
}

void flip_x(nn::Tensor& t) {
  const nn::Shape s = t.shape();
  auto& d = t.data();
  for (std::size_t row = 0; row < d.size() / s.w; ++row) {
    std::reverse(d.begin() + row * s.w, d.begin() + (row + 1) * s.w);
  }
}

namespace {

// In-plane rotation of every (n, c, z) slice about the slice center.
void rotate_xy(nn::Tensor& t, double angle_deg, bool nearest) {
  const nn::Shape s = t.shape();
  const double th = angle_deg * std::numbers::pi / 180.0;
  const double cs = std::cos(th), sn = std::sin(th);
  const double cx = 0.5 * (s.w - 1), cy = 0.5 * (s.h - 1);
  const std::size_t plane = static_cast<std::size_t>(s.h) * s.w;
  std::vector<float> src(plane);
  for (std::size_t sl = 0; sl < t.size() / plane; ++sl) {
    float* p = t.data().data() + sl * plane;
    std::copy(p, p + plane, src.begin());
    for (int y = 0; y < s.h; ++y) {
      for (int x = 0; x < s.w; ++x) {
        // Inverse map: output (x, y) samples the source rotated by -angle.
        const double dx = x - cx, dy = y - cy;
        double u = cs * dx + sn * dy + cx;
        double v = -sn * dx + cs * dy + cy;
        u = std::clamp(u, 0.0, static_cast<double>(s.w - 1));
        v = std::clamp(v, 0.0, static_cast<double>(s.h - 1));
        float value;
        if (nearest) {
          value = src[static_cast<std::size_t>(std::lround(v)) * s.w + std::lround(u)];
        } else {
          const int i0 = std::min(static_cast<int>(u), s.w - 1), j0 = std::min(static_cast<int>(v), s.h - 1);
          const int i1 = std::min(i0 + 1, s.w - 1), j1 = std::min(j0 + 1, s.h - 1);
          const float fx = static_cast<float>(u - i0), fy = static_cast<float>(v - j0);
          const float a = src[j0 * s.w + i0] + fx * (src[j0 * s.w + i1] - src[j0 * s.w + i0]);
          const float b = src[j1 * s.w + i0] + fx * (src[j1 * s.w + i1] - src[j1 * s.w + i0]);
          value = a + fy * (b - a);
        }
        p[static_cast<std::size_t>(y) * s.w + x] = value;
      }
    }
  }
}

}  // namespace

void augment(Patch& p, const AugParams& a, int image_channels, Rng& noise_rng) {
  if (a.flip) {
    flip_x(p.image);
    flip_x(p.gt);
  }
  if (a.angle_deg != 0.0) {
    rotate_xy(p.image, a.angle_deg, false);
    rotate_xy(p.gt, a.angle_deg, true);
  }
  const nn::Shape s = p.image.shape();
  const double sd = std::sqrt(a.noise_var);
  for (int n = 0; n < s.n; ++n) {
    for (int c = 0; c < std::min(image_channels, s.c); ++c) {
      float* q = p.image.channel(n, c);
      for (std::size_t i = 0; i < s.spatial(); ++i) {
        double v = q[i] * a.scale;
        if (sd > 0) v += sd * noise_rng.normal();
        q[i] = static_cast<float>(v);
      }
    }
  }
}

}  // namespace gtvseg::pipeline
