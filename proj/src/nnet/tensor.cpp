#include "gtvseg/nnet/tensor.hpp"

#include <algorithm>

#include "gtvseg/volcore/geometry.hpp"

namespace gtvseg::nn {

std::string to_string(const Shape& s) {
  return "(" + std::to_string(s.n) + "," + std::to_string(s.c) + "," + std::to_string(s.d) + "," +
         std::to_string(s.h) + "," + std::to_string(s.w) + ")";
}

Tensor::Tensor(Shape s, float fill) : shape_(s) {
  if (s.n < 0 || s.c < 0 || s.d < 0 || s.h < 0 || s.w < 0) {
    throw Error("tensor shape must be non-negative: " + to_string(s));
  }
  data_.assign(s.numel(), fill);
}

std::vector<float>& Tensor::grad() {
  if (grad_.size() != data_.size()) grad_.assign(data_.size(), 0.0f);
  return grad_;
}

void Tensor::zero_grad() {
  if (!grad_.empty()) std::fill(grad_.begin(), grad_.end(), 0.0f);
}

TensorPtr make_tensor(Shape s, float fill) { return std::make_shared<Tensor>(s, fill); }

void Tape::backward(const TensorPtr& out) {
  auto& g = out->grad();
  std::fill(g.begin(), g.end(), 1.0f);
  for (auto it = steps_.rbegin(); it != steps_.rend(); ++it) (*it)();
}

void Tape::backward(const TensorPtr& out, const std::vector<float>& seed) {
  if (seed.size() != out->size()) throw Error("backward seed size does not match the output");
  out->grad() = seed;
  for (auto it = steps_.rbegin(); it != steps_.rend(); ++it) (*it)();
}

}  // namespace gtvseg::nn
