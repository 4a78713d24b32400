#include "gtvseg/pipeline/inference.hpp"

#include <algorithm>

namespace gtvseg::pipeline {

Box lung_crop(const Mask& lungs, int margin) {
  const Box b = bounding_box(lungs);
  if (b.empty()) throw Error("lung_crop: empty lung mask");
  const Index3 d = lungs.dims();
  Box out;
  out.lo = {std::max(0, b.lo.x - margin), std::max(0, b.lo.y - margin), 0};
  out.hi = {std::min(d.x, b.hi.x + margin), std::min(d.y, b.hi.y + margin), d.z};
  return out;
}

std::vector<int> axis_starts(int lo, int hi, int voi, int stride) {
  if (hi - lo < voi) {
    throw Error("crop extent " + std::to_string(hi - lo) + " is smaller than the window " +
                std::to_string(voi));
  }
  std::vector<int> s;
  for (int p = lo; p + voi <= hi; p += stride) s.push_back(p);
  if (s.back() + voi < hi) s.push_back(hi - voi);
  return s;
}

std::vector<Index3> window_origins(const Box& crop, Index3 voi, Index3 stride) {
  const auto xs = axis_starts(crop.lo.x, crop.hi.x, voi.x, stride.x);
  const auto ys = axis_starts(crop.lo.y, crop.hi.y, voi.y, stride.y);
  const auto zs = axis_starts(crop.lo.z, crop.hi.z, voi.z, stride.z);
  std::vector<Index3> out;
  for (int z : zs) {
    for (int y : ys) {
      for (int x : xs) out.push_back({x, y, z});
    }
  }
  return out;
}

Volume sliding_window_infer(const std::vector<Volume>& channels, const Box& crop, Index3 voi,
                            Index3 stride, const WindowModel& model) {
  if (channels.empty()) throw Error("sliding_window_infer: no input channels");
  const Geometry& g = channels.front().geometry();
  const std::vector<Index3> origins = window_origins(crop, voi, stride);
  std::vector<double> sum(g.voxel_count(), 0.0);
  std::vector<int> count(g.voxel_count(), 0);
  const int C = static_cast<int>(channels.size());
  for (const Index3& lo : origins) {
    auto x = nn::make_tensor({1, C, voi.z, voi.y, voi.x});
    for (int c = 0; c < C; ++c) {
      float* dst = x->channel(0, c);
      for (int k = 0; k < voi.z; ++k) {
        for (int j = 0; j < voi.y; ++j) {
          const auto src = channels[c].data().begin() + g.linear(lo.x, lo.y + j, lo.z + k);
          std::copy_n(src, voi.x, dst + (static_cast<std::size_t>(k) * voi.y + j) * voi.x);
        }
      }
    }
    const std::vector<float> p = model(x);
    if (p.size() != static_cast<std::size_t>(voi.x) * voi.y * voi.z) {
      throw Error("sliding_window_infer: model returned a map of the wrong size");
    }
    for (int k = 0; k < voi.z; ++k) {
      for (int j = 0; j < voi.y; ++j) {
        const std::size_t dst = g.linear(lo.x, lo.y + j, lo.z + k);
        const std::size_t src = (static_cast<std::size_t>(k) * voi.y + j) * voi.x;
        for (int i = 0; i < voi.x; ++i) {
          sum[dst + i] += p[src + i];
          ++count[dst + i];
        }
      }
    }
  }
  Volume out(g);
  for (std::size_t n = 0; n < out.size(); ++n) {
    if (count[n]) out[n] = static_cast<float>(sum[n] / count[n]);
  }
  return out;
}

WindowModel ensemble_model(std::vector<models::Psnn>& members) {
  if (members.empty()) throw Error("ensemble has no members");
  return [&members](const nn::TensorPtr& x) {
    std::vector<double> acc(x->shape().spatial(), 0.0);
    for (auto& m : members) {
      const auto out = m.forward(nullptr, x, false);
      const auto& p = out.maps.back()->data();
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += p[i];
    }
    std::vector<float> mean(acc.size());
    for (std::size_t i = 0; i < acc.size(); ++i) mean[i] = static_cast<float>(acc[i] / members.size());
    return mean;
  };
}

}  // namespace gtvseg::pipeline
