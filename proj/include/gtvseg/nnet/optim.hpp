#pragma once

#include <vector>

#include "gtvseg/nnet/tensor.hpp"

namespace gtvseg::nn {

/// lr(t) = lr0 * (1 - t / total_steps)^power.
struct PolySchedule {
  double lr0 = 0.01;
  double power = 0.9;
  long total_steps = 1;

  double lr(long t) const;
};

/// SGD with Nesterov momentum:
///   v <- mu * v - lr * g
///   p <- p + mu * v - lr * g
class SgdNesterov {
 public:
  SgdNesterov(std::vector<Param> params, PolySchedule schedule, double momentum = 0.99);

  /// Applies one update with lr(t) using the parameters' current gradients.
  /// Throws when t >= total_steps.
  void step(long t);
  void zero_grad();

  const PolySchedule& schedule() const { return schedule_; }
  double momentum() const { return momentum_; }
  const std::vector<std::vector<float>>& velocity() const { return velocity_; }

 private:
  std::vector<Param> params_;
  PolySchedule schedule_;
  double momentum_;
  std::vector<std::vector<float>> velocity_;
};

}  // namespace gtvseg::nn
