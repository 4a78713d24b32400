#include "gtvseg/nnet/loss.hpp"

#include <cmath>

#include "gtvseg/volcore/geometry.hpp"

namespace gtvseg::nn {

TensorPtr dice_bce_loss(Tape* tape, const TensorPtr& logits, const Tensor& target) {
  if (!(logits->shape() == target.shape())) {
    throw Error("dice_bce_loss: logits " + to_string(logits->shape()) + " vs target " +
                to_string(target.shape()));
  }
  const std::size_t M = logits->size();
  std::vector<double> p(M);
  double inter = 0.0, sum_p = 0.0, sum_t = 0.0, bce = 0.0;
  for (std::size_t i = 0; i < M; ++i) {
    const double z = (*logits)[i];
    const double t = target[i];
    p[i] = 1.0 / (1.0 + std::exp(-z));
    inter += p[i] * t;
    sum_p += p[i];
    sum_t += t;
    bce += std::max(z, 0.0) - z * t + std::log1p(std::exp(-std::abs(z)));
  }
  const double A = 2.0 * inter + 1.0;
  const double B = sum_p + sum_t + 1.0;
  const double loss = 0.5 * (1.0 - A / B) + 0.5 * bce / static_cast<double>(M);
  auto out = make_tensor({1, 1, 1, 1, 1}, static_cast<float>(loss));

  if (tape) {
    std::vector<float> t(target.data());
    tape->record([logits, out, p = std::move(p), t = std::move(t), A, B, M]() {
      const auto& go = out->grad();
      if (go.empty()) return;
      const double g = go[0];
      auto& gx = logits->grad();
      for (std::size_t i = 0; i < M; ++i) {
        const double ddice_dp = (2.0 * t[i] * B - A) / (B * B);
        const double dp_dz = p[i] * (1.0 - p[i]);
        const double d = -0.5 * ddice_dp * dp_dz + 0.5 * (p[i] - t[i]) / static_cast<double>(M);
        gx[i] += static_cast<float>(g * d);
      }
    });
  }
  return out;
}

}  // namespace gtvseg::nn
