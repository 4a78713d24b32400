#include "gtvseg/pipeline/vois.hpp"

#include <algorithm>

namespace gtvseg::pipeline {

Index3 window_origin(Index3 center, Index3 voi, Index3 dims) {
  Index3 lo;
  for (int a = 0; a < 3; ++a) {
    if (voi[a] > dims[a]) {
      throw Error("volume dim " + std::to_string(dims[a]) + " is smaller than the VOI edge " +
                  std::to_string(voi[a]));
    }
    lo[a] = std::clamp(center[a] - voi[a] / 2, 0, dims[a] - voi[a]);
  }
  return lo;
}

std::vector<VoiPlan> plan_vois(const Mask& gt, Index3 voi, int positives, int negatives, Rng& rng) {
  const Geometry& g = gt.geometry();
  for (int a = 0; a < 3; ++a) {
    if (voi[a] > g.dims[a]) {
      throw Error("volume " + to_string(g) + " is smaller than the VOI");
    }
  }
  std::vector<std::size_t> inside;
  for (std::size_t n = 0; n < gt.size(); ++n) {
    if (gt[n]) inside.push_back(n);
  }
  if (inside.empty()) throw Error("sample_vois: ground truth is empty");
  if (negatives > 0 && inside.size() == gt.size()) {
    throw Error("sample_vois: no background voxel for negative VOIs");
  }
  std::vector<VoiPlan> plans;
  for (int i = 0; i < positives; ++i) {
    const Index3 c = g.unravel(inside[rng.below(inside.size())]);
    plans.push_back({c, window_origin(c, voi, g.dims), true});
  }
  for (int i = 0; i < negatives; ++i) {
    std::size_t n;
    do {
      n = rng.below(gt.size());
    } while (gt[n]);
    const Index3 c = g.unravel(n);
    plans.push_back({c, window_origin(c, voi, g.dims), false});
  }
  return plans;
}

Patch extract_patch(const std::vector<Volume>& channels, const Mask& gt, Index3 lo, Index3 voi) {
  const Geometry& g = gt.geometry();
  Patch p;
  p.lo = lo;
  p.image = nn::Tensor({1, static_cast<int>(channels.size()), voi.z, voi.y, voi.x});
  p.gt = nn::Tensor({1, 1, voi.z, voi.y, voi.x});
  for (std::size_t c = 0; c < channels.size(); ++c) {
    if (!(channels[c].geometry() == g)) throw Error("extract_patch: channel geometry mismatch");
    float* dst = p.image.channel(0, static_cast<int>(c));
    for (int k = 0; k < voi.z; ++k) {
      for (int j = 0; j < voi.y; ++j) {
        const std::size_t src = g.linear(lo.x, lo.y + j, lo.z + k);
        std::copy_n(channels[c].data().begin() + src, voi.x, dst + (static_cast<std::size_t>(k) * voi.y + j) * voi.x);
      }
    }
  }
  float* dst = p.gt.channel(0, 0);
  for (int k = 0; k < voi.z; ++k) {
    for (int j = 0; j < voi.y; ++j) {
      const std::size_t src = g.linear(lo.x, lo.y + j, lo.z + k);
      for (int i = 0; i < voi.x; ++i) dst[(static_cast<std::size_t>(k) * voi.y + j) * voi.x + i] = gt[src + i];
    }
  }
  return p;
}

std::vector<Patch> sample_vois(const std::vector<Volume>& channels, const Mask& gt,
                               const TrainConfig& cfg, Rng& rng) {
  std::vector<Patch> out;
  for (const auto& plan : plan_vois(gt, cfg.voi, cfg.pos_per_volume, cfg.neg_per_volume, rng)) {
    out.push_back(extract_patch(channels, gt, plan.lo, cfg.voi));
    out.back().positive = plan.positive;
  }
  return out;
}

}  // namespace gtvseg::pipeline
