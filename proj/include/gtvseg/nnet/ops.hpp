#pragma once

#include <vector>

#include "gtvseg/nnet/tensor.hpp"

namespace gtvseg::nn {

/// Cross-correlation with stride 1 and zero padding k/2 (spatial shape kept).
/// w: (C_out, C_in, k, k, k) with k in {1, 3}; b: (1, C_out, 1, 1, 1) or null.
TensorPtr conv3d(Tape* tape, const TensorPtr& x, const TensorPtr& w, const TensorPtr& b);

struct BatchNorm {
  TensorPtr gamma;  // (1, C, 1, 1, 1)
  TensorPtr beta;
  std::vector<float> running_mean;
  std::vector<float> running_var;
  double momentum = 0.9;  // running = momentum * running + (1 - momentum) * batch
  double eps = 1e-5;

  explicit BatchNorm(int channels = 0);
  int channels() const { return static_cast<int>(running_mean.size()); }
};

/// Train mode normalizes with batch statistics over N*D*H*W and updates the
/// running statistics (unbiased variance); eval mode uses the running ones.
TensorPtr batchnorm3d(Tape* tape, const TensorPtr& x, BatchNorm& bn, bool train);

TensorPtr relu(Tape* tape, const TensorPtr& x);
/// 2x2x2 max pooling with stride 2; odd D/H/W are rejected.
TensorPtr maxpool2x(Tape* tape, const TensorPtr& x);
/// Trilinear x2 upsampling, half-voxel (align_corners = false) convention with
/// edge clamping.
TensorPtr upsample2x(Tape* tape, const TensorPtr& x);
TensorPtr add(Tape* tape, const TensorPtr& a, const TensorPtr& b);
/// Logistic function, clamped to [1e-7, 1 - 1e-7] so maps stay strictly inside (0, 1).
TensorPtr sigmoid(Tape* tape, const TensorPtr& x);
/// Stacks inputs with equal N, D, H, W along the channel axis.
TensorPtr concat_channels(Tape* tape, const std::vector<TensorPtr>& xs);

/// He-normal initialization: N(0, 2 / fan_in).
void he_normal(Tensor& w, std::uint64_t seed);

}  // namespace gtvseg::nn
