#include "gtvseg/nnet/optim.hpp"

#include <cmath>

#include "gtvseg/volcore/geometry.hpp"

namespace gtvseg::nn {

double PolySchedule::lr(long t) const {
  if (total_steps < 1) throw Error("poly schedule needs total_steps >= 1");
  if (t < 0 || t >= total_steps) {
    throw Error("poly schedule step " + std::to_string(t) + " outside [0, " +
                std::to_string(total_steps) + ")");
  }
  return lr0 * std::pow(1.0 - static_cast<double>(t) / static_cast<double>(total_steps), power);
}

SgdNesterov::SgdNesterov(std::vector<Param> params, PolySchedule schedule, double momentum)
    : params_(std::move(params)), schedule_(schedule), momentum_(momentum) {
  for (const auto& p : params_) velocity_.emplace_back(p.tensor->size(), 0.0f);
}

void SgdNesterov::step(long t) {
  const double lr = schedule_.lr(t);
  const float mu = static_cast<float>(momentum_);
  const float eta = static_cast<float>(lr);
  for (std::size_t k = 0; k < params_.size(); ++k) {
    Tensor& p = *params_[k].tensor;
    if (!p.has_grad()) continue;
    const auto& g = p.grad();
    auto& v = velocity_[k];
    for (std::size_t i = 0; i < p.size(); ++i) {
      v[i] = mu * v[i] - eta * g[i];
      p[i] += mu * v[i] - eta * g[i];
    }
  }
}

void SgdNesterov::zero_grad() {
  for (auto& p : params_) p.tensor->zero_grad();
}

}  // namespace gtvseg::nn
