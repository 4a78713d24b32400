#include "gtvseg/nnet/ops.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

#include "gtvseg/volcore/geometry.hpp"
#include "gtvseg/volcore/rng.hpp"

namespace gtvseg::nn {
namespace {

using RowMat = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapMat = Eigen::Map<RowMat>;
using ConstMapMat = Eigen::Map<const RowMat>;

// Column buffer for a 3x3x3 kernel: row (ci, kz, ky, kx), column = output voxel.
void im2col3(const float* x, int C, int D, int H, int W, float* cols) {
  const std::size_t V = static_cast<std::size_t>(D) * H * W;
  for (int c = 0; c < C; ++c) {
    const float* xc = x + c * V;
    for (int kz = 0; kz < 3; ++kz) {
      for (int ky = 0; ky < 3; ++ky) {
        for (int kx = 0; kx < 3; ++kx) {
          float* row = cols + (static_cast<std::size_t>(c) * 27 + kz * 9 + ky * 3 + kx) * V;
          for (int z = 0; z < D; ++z) {
            const int zs = z + kz - 1;
            for (int y = 0; y < H; ++y) {
              float* dst = row + (static_cast<std::size_t>(z) * H + y) * W;
              const int ys = y + ky - 1;
              if (zs < 0 || zs >= D || ys < 0 || ys >= H) {
                std::fill(dst, dst + W, 0.0f);
                continue;
              }
              const float* src = xc + (static_cast<std::size_t>(zs) * H + ys) * W;
              const int lo = std::max(0, 1 - kx);
              const int hi = std::min(W, W + 1 - kx);
              for (int xx = 0; xx < lo; ++xx) dst[xx] = 0.0f;
              std::memcpy(dst + lo, src + lo + kx - 1, sizeof(float) * (hi - lo));
              for (int xx = hi; xx < W; ++xx) dst[xx] = 0.0f;
            }
          }
        }
      }
    }
  }
}

// Adjoint of im2col3: accumulates column gradients back into dx.
void col2im3(const float* cols, int C, int D, int H, int W, float* dx) {
  const std::size_t V = static_cast<std::size_t>(D) * H * W;
  for (int c = 0; c < C; ++c) {
    float* dc = dx + c * V;
    for (int kz = 0; kz < 3; ++kz) {
      for (int ky = 0; ky < 3; ++ky) {
        for (int kx = 0; kx < 3; ++kx) {
          const float* row = cols + (static_cast<std::size_t>(c) * 27 + kz * 9 + ky * 3 + kx) * V;
          for (int z = 0; z < D; ++z) {
            const int zs = z + kz - 1;
            if (zs < 0 || zs >= D) continue;
            for (int y = 0; y < H; ++y) {
              const int ys = y + ky - 1;
              if (ys < 0 || ys >= H) continue;
              const float* src = row + (static_cast<std::size_t>(z) * H + y) * W;
              float* dst = dc + (static_cast<std::size_t>(zs) * H + ys) * W;
              const int lo = std::max(0, 1 - kx);
              const int hi = std::min(W, W + 1 - kx);
              for (int xx = lo; xx < hi; ++xx) dst[xx + kx - 1] += src[xx];
            }
          }
        }
      }
    }
  }
}

void require_same(const Shape& a, const Shape& b, const char* what) {
  if (!(a == b)) throw Error(std::string(what) + ": shape mismatch " + to_string(a) + " vs " + to_string(b));
}

}  // namespace

TensorPtr conv3d(Tape* tape, const TensorPtr& x, const TensorPtr& w, const TensorPtr& b) {
  const Shape xs = x->shape();
  const Shape ws = w->shape();
  const int k = ws.d;
  if (ws.h != k || ws.w != k || (k != 1 && k != 3)) {
    throw Error("conv3d: kernel must be 1x1x1 or 3x3x3, got " + to_string(ws));
  }
  if (ws.c != xs.c) {
    throw Error("conv3d: input has " + std::to_string(xs.c) + " channels, kernel expects " +
                std::to_string(ws.c));
  }
  const int cout = ws.n;
  if (b && (b->shape().c != cout || b->size() != static_cast<std::size_t>(cout))) {
    throw Error("conv3d: bias shape " + to_string(b->shape()) + " does not match " +
                std::to_string(cout) + " output channels");
  }
  const Shape ys{xs.n, cout, xs.d, xs.h, xs.w};
  auto y = make_tensor(ys);
  const int V = static_cast<int>(xs.spatial());
  const int K = xs.c * k * k * k;

  std::vector<float> cols(k == 3 ? static_cast<std::size_t>(K) * V : 0);
  const ConstMapMat W(w->data().data(), cout, K);
  for (int n = 0; n < xs.n; ++n) {
    const float* xn = x->channel(n, 0);
    const float* src = xn;
    if (k == 3) {
      im2col3(xn, xs.c, xs.d, xs.h, xs.w, cols.data());
      src = cols.data();
    }
    MapMat Y(y->channel(n, 0), cout, V);
    Y.noalias() = W * ConstMapMat(src, K, V);
    if (b) {
      for (int c = 0; c < cout; ++c) Y.row(c).array() += (*b)[c];
    }
  }

  if (tape) {
    tape->record([x, w, b, y, k, K, V, cout]() {
      const Shape xs = x->shape();
      const std::vector<float>& gy = y->grad();
      if (gy.empty()) return;
      auto& gw = w->grad();
      auto& gx = x->grad();
      MapMat GW(gw.data(), cout, K);
      const ConstMapMat W(w->data().data(), cout, K);
      std::vector<float> cols(k == 3 ? static_cast<std::size_t>(K) * V : 0);
      RowMat dcols;
      for (int n = 0; n < xs.n; ++n) {
        const ConstMapMat GY(gy.data() + static_cast<std::size_t>(n) * cout * V, cout, V);
        const float* xn = x->channel(n, 0);
        const float* src = xn;
        if (k == 3) {
          im2col3(xn, xs.c, xs.d, xs.h, xs.w, cols.data());
          src = cols.data();
        }
        GW.noalias() += GY * ConstMapMat(src, K, V).transpose();
        if (b) {
          auto& gb = b->grad();
          // Plain loop: Eigen's vectorized sum splits by buffer alignment, which
          // would make the result depend on the allocation address.
          for (int c = 0; c < cout; ++c) {
            const float* row = gy.data() + (static_cast<std::size_t>(n) * cout + c) * V;
            double sum = 0.0;
            for (int i = 0; i < V; ++i) sum += row[i];
            gb[c] += static_cast<float>(sum);
          }
        }
        float* gxn = gx.data() + static_cast<std::size_t>(n) * xs.c * V;
        if (k == 3) {
          dcols.noalias() = W.transpose() * GY;
          col2im3(dcols.data(), xs.c, xs.d, xs.h, xs.w, gxn);
        } else {
          MapMat(gxn, K, V).noalias() += W.transpose() * GY;
        }
      }
    });
  }
  return y;
}

BatchNorm::BatchNorm(int channels)
    : gamma(make_tensor({1, channels, 1, 1, 1}, 1.0f)),
      beta(make_tensor({1, channels, 1, 1, 1}, 0.0f)),
      running_mean(channels, 0.0f),
      running_var(channels, 1.0f) {}

TensorPtr batchnorm3d(Tape* tape, const TensorPtr& x, BatchNorm& bn, bool train) {
  const Shape s = x->shape();
  if (s.c != bn.channels()) {
    throw Error("batchnorm3d: input has " + std::to_string(s.c) + " channels, layer has " +
                std::to_string(bn.channels()));
  }
  const std::size_t V = s.spatial();
  const std::size_t m = static_cast<std::size_t>(s.n) * V;
  if (train && m < 2) {
    throw Error("batchnorm3d: train mode needs more than one element per channel, got shape " +
                to_string(s));
  }
  auto y = make_tensor(s);
  std::vector<float> mean(s.c), inv_std(s.c);
  for (int c = 0; c < s.c; ++c) {
    if (train) {
      double sum = 0.0;
      for (int n = 0; n < s.n; ++n) {
        const float* p = x->channel(n, c);
        for (std::size_t v = 0; v < V; ++v) sum += p[v];
      }
      const double mu = sum / static_cast<double>(m);
      double sq = 0.0;
      for (int n = 0; n < s.n; ++n) {
        const float* p = x->channel(n, c);
        for (std::size_t v = 0; v < V; ++v) sq += (p[v] - mu) * (p[v] - mu);
      }
      const double var = sq / static_cast<double>(m);
      mean[c] = static_cast<float>(mu);
      inv_std[c] = static_cast<float>(1.0 / std::sqrt(var + bn.eps));
      const double unbiased = sq / static_cast<double>(m - 1);
      bn.running_mean[c] = static_cast<float>(bn.momentum * bn.running_mean[c] + (1 - bn.momentum) * mu);
      bn.running_var[c] = static_cast<float>(bn.momentum * bn.running_var[c] + (1 - bn.momentum) * unbiased);
    } else {
      mean[c] = bn.running_mean[c];
      inv_std[c] = static_cast<float>(1.0 / std::sqrt(static_cast<double>(bn.running_var[c]) + bn.eps));
    }
    const float g = (*bn.gamma)[c];
    const float b = (*bn.beta)[c];
    for (int n = 0; n < s.n; ++n) {
      const float* p = x->channel(n, c);
      float* q = y->channel(n, c);
      for (std::size_t v = 0; v < V; ++v) q[v] = g * (p[v] - mean[c]) * inv_std[c] + b;
    }
  }

  if (tape) {
    TensorPtr gamma = bn.gamma, beta = bn.beta;
    tape->record([x, y, gamma, beta, mean, inv_std, train, V, m]() {
      const Shape s = x->shape();
      const std::vector<float>& gy = y->grad();
      if (gy.empty()) return;
      auto& gx = x->grad();
      auto& gg = gamma->grad();
      auto& gb = beta->grad();
      for (int c = 0; c < s.c; ++c) {
        double sum_dy = 0.0, sum_dy_xhat = 0.0;
        for (int n = 0; n < s.n; ++n) {
          const std::size_t off = (static_cast<std::size_t>(n) * s.c + c) * V;
          for (std::size_t v = 0; v < V; ++v) {
            const double xhat = (x->data()[off + v] - mean[c]) * inv_std[c];
            sum_dy += gy[off + v];
            sum_dy_xhat += gy[off + v] * xhat;
          }
        }
        gg[c] += static_cast<float>(sum_dy_xhat);
        gb[c] += static_cast<float>(sum_dy);
        const double g = (*gamma)[c];
        const double md = static_cast<double>(m);
        for (int n = 0; n < s.n; ++n) {
          const std::size_t off = (static_cast<std::size_t>(n) * s.c + c) * V;
          for (std::size_t v = 0; v < V; ++v) {
            if (train) {
              const double xhat = (x->data()[off + v] - mean[c]) * inv_std[c];
              gx[off + v] += static_cast<float>(g * inv_std[c] / md *
                                                (md * gy[off + v] - sum_dy - xhat * sum_dy_xhat));
            } else {
              gx[off + v] += static_cast<float>(g * inv_std[c] * gy[off + v]);
            }
          }
        }
      }
    });
  }
  return y;
}

TensorPtr relu(Tape* tape, const TensorPtr& x) {
  auto y = make_tensor(x->shape());
  for (std::size_t i = 0; i < x->size(); ++i) (*y)[i] = std::max((*x)[i], 0.0f);
  if (tape) {
    tape->record([x, y]() {
      const auto& gy = y->grad();
      if (gy.empty()) return;
      auto& gx = x->grad();
      for (std::size_t i = 0; i < gx.size(); ++i) {
        if ((*x)[i] > 0.0f) gx[i] += gy[i];
      }
    });
  }
  return y;
}

TensorPtr maxpool2x(Tape* tape, const TensorPtr& x) {
  const Shape s = x->shape();
  if (s.d % 2 || s.h % 2 || s.w % 2) {
    throw Error("maxpool2x: spatial dims must be even, got " + to_string(s));
  }
  const Shape os{s.n, s.c, s.d / 2, s.h / 2, s.w / 2};
  auto y = make_tensor(os);
  std::vector<std::uint32_t> arg(y->size());
  std::size_t o = 0;
  for (int n = 0; n < s.n; ++n) {
    for (int c = 0; c < s.c; ++c) {
      const std::size_t base = (static_cast<std::size_t>(n) * s.c + c) * s.spatial();
      for (int z = 0; z < os.d; ++z) {
        for (int yy = 0; yy < os.h; ++yy) {
          for (int xx = 0; xx < os.w; ++xx, ++o) {
            float best = -std::numeric_limits<float>::infinity();
            std::size_t best_i = 0;
            for (int dz = 0; dz < 2; ++dz) {
              for (int dy = 0; dy < 2; ++dy) {
                for (int dx = 0; dx < 2; ++dx) {
                  const std::size_t i =
                      base + (static_cast<std::size_t>(2 * z + dz) * s.h + 2 * yy + dy) * s.w + 2 * xx + dx;
                  if ((*x)[i] > best) {
                    best = (*x)[i];
                    best_i = i;
                  }
                }
              }
            }
            (*y)[o] = best;
            arg[o] = static_cast<std::uint32_t>(best_i);
          }
        }
      }
    }
  }
  if (tape) {
    tape->record([x, y, arg = std::move(arg)]() {
      const auto& gy = y->grad();
      if (gy.empty()) return;
      auto& gx = x->grad();
      for (std::size_t o = 0; o < gy.size(); ++o) gx[arg[o]] += gy[o];
    });
  }
  return y;
}

namespace {

struct Taps {
  std::vector<int> i0, i1;
  std::vector<float> w1;  // weight of i1; i0 gets 1 - w1
};

Taps upsample_taps(int n) {
  Taps t;
  for (int o = 0; o < 2 * n; ++o) {
    double src = (o + 0.5) / 2.0 - 0.5;
    src = std::clamp(src, 0.0, static_cast<double>(n - 1));
    const int i0 = std::min(static_cast<int>(std::floor(src)), n - 1);
    const int i1 = std::min(i0 + 1, n - 1);
    t.i0.push_back(i0);
    t.i1.push_back(i1);
    t.w1.push_back(static_cast<float>(src - i0));
  }
  return t;
}

}  // namespace

TensorPtr upsample2x(Tape* tape, const TensorPtr& x) {
  const Shape s = x->shape();
  const Shape os{s.n, s.c, 2 * s.d, 2 * s.h, 2 * s.w};
  auto y = make_tensor(os);
  const Taps tz = upsample_taps(s.d), ty = upsample_taps(s.h), tx = upsample_taps(s.w);
  auto visit = [s, os, tz, ty, tx](auto&& fn) {
    for (int nc = 0; nc < s.n * s.c; ++nc) {
      const std::size_t ib = static_cast<std::size_t>(nc) * s.spatial();
      const std::size_t ob = static_cast<std::size_t>(nc) * os.spatial();
      std::size_t o = ob;
      for (int z = 0; z < os.d; ++z) {
        for (int yy = 0; yy < os.h; ++yy) {
          for (int xx = 0; xx < os.w; ++xx, ++o) {
            const float wz = tz.w1[z], wy = ty.w1[yy], wx = tx.w1[xx];
            const int zi[2] = {tz.i0[z], tz.i1[z]};
            const int yi[2] = {ty.i0[yy], ty.i1[yy]};
            const int xi[2] = {tx.i0[xx], tx.i1[xx]};
            const float fz[2] = {1 - wz, wz}, fy[2] = {1 - wy, wy}, fx[2] = {1 - wx, wx};
            for (int a = 0; a < 2; ++a) {
              for (int b = 0; b < 2; ++b) {
                for (int c = 0; c < 2; ++c) {
                  const std::size_t i = ib + (static_cast<std::size_t>(zi[a]) * s.h + yi[b]) * s.w + xi[c];
                  fn(i, o, fz[a] * fy[b] * fx[c]);
                }
              }
            }
          }
        }
      }
    }
  };
  visit([&](std::size_t i, std::size_t o, float w) { (*y)[o] += w * (*x)[i]; });
  if (tape) {
    tape->record([x, y, visit]() {
      const auto& gy = y->grad();
      if (gy.empty()) return;
      auto& gx = x->grad();
      visit([&](std::size_t i, std::size_t o, float w) { gx[i] += w * gy[o]; });
    });
  }
  return y;
}

TensorPtr add(Tape* tape, const TensorPtr& a, const TensorPtr& b) {
  require_same(a->shape(), b->shape(), "add");
  auto y = make_tensor(a->shape());
  for (std::size_t i = 0; i < y->size(); ++i) (*y)[i] = (*a)[i] + (*b)[i];
  if (tape) {
    tape->record([a, b, y]() {
      const auto& gy = y->grad();
      if (gy.empty()) return;
      auto& ga = a->grad();
      for (std::size_t i = 0; i < gy.size(); ++i) ga[i] += gy[i];
      auto& gb = b->grad();
      for (std::size_t i = 0; i < gy.size(); ++i) gb[i] += gy[i];
    });
  }
  return y;
}

TensorPtr sigmoid(Tape* tape, const TensorPtr& x) {
  constexpr float lo = 1e-7f, hi = 1.0f - 1e-7f;
  auto y = make_tensor(x->shape());
  for (std::size_t i = 0; i < x->size(); ++i) {
    const double v = 1.0 / (1.0 + std::exp(-static_cast<double>((*x)[i])));
    (*y)[i] = std::clamp(static_cast<float>(v), lo, hi);
  }
  if (tape) {
    tape->record([x, y]() {
      const auto& gy = y->grad();
      if (gy.empty()) return;
      auto& gx = x->grad();
      for (std::size_t i = 0; i < gy.size(); ++i) {
        const float p = (*y)[i];
        if (p > lo && p < hi) gx[i] += gy[i] * p * (1 - p);
      }
    });
  }
  return y;
}

TensorPtr concat_channels(Tape* tape, const std::vector<TensorPtr>& xs) {
  if (xs.empty()) throw Error("concat_channels: no inputs");
  Shape s = xs.front()->shape();
  int channels = 0;
  for (const auto& x : xs) {
    const Shape t = x->shape();
    if (t.n != s.n || t.d != s.d || t.h != s.h || t.w != s.w) {
      throw Error("concat_channels: shape mismatch " + to_string(t) + " vs " + to_string(s));
    }
    channels += t.c;
  }
  s.c = channels;
  auto y = make_tensor(s);
  const std::size_t V = s.spatial();
  for (int n = 0; n < s.n; ++n) {
    int c0 = 0;
    for (const auto& x : xs) {
      const int c = x->shape().c;
      std::copy_n(x->channel(n, 0), c * V, y->channel(n, c0));
      c0 += c;
    }
  }
  if (tape) {
    tape->record([xs, y, V]() {
      const auto& gy = y->grad();
      if (gy.empty()) return;
      const Shape s = y->shape();
      for (int n = 0; n < s.n; ++n) {
        int c0 = 0;
        for (const auto& x : xs) {
          const int c = x->shape().c;
          auto& gx = x->grad();
          const float* src = gy.data() + (static_cast<std::size_t>(n) * s.c + c0) * V;
          float* dst = gx.data() + static_cast<std::size_t>(n) * c * V;
          for (std::size_t i = 0; i < c * V; ++i) dst[i] += src[i];
          c0 += c;
        }
      }
    });
  }
  return y;
}

void he_normal(Tensor& w, std::uint64_t seed) {
  const Shape s = w.shape();
  const double fan_in = static_cast<double>(s.c) * s.d * s.h * s.w;
  const double sd = std::sqrt(2.0 / std::max(fan_in, 1.0));
  Rng rng(seed);
  for (auto& v : w.data()) v = static_cast<float>(sd * rng.normal());
}

}  // namespace gtvseg::nn
