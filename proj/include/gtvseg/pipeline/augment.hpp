#pragma once

#include "gtvseg/pipeline/config.hpp"
#include "gtvseg/pipeline/vois.hpp"

namespace gtvseg::pipeline {

struct AugParams {
  bool flip = false;       // mirror along x
  double angle_deg = 0;    // in-plane (x-y) rotation about the patch center
  double scale = 1;        // multiplicative intensity factor
  double noise_var = 0;    // additive Gaussian noise variance
};

AugParams draw_aug(const AugConfig& cfg, Rng& rng);

/// Geometric transforms apply to every channel (trilinear, border clamp) and
/// to the ground truth (nearest); intensity scale and noise only to the first
/// `image_channels` channels.
void augment(Patch& p, const AugParams& a, int image_channels, Rng& noise_rng);

void flip_x(nn::Tensor& t);

}  // namespace gtvseg::pipeline
