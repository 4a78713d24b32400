#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace gtvseg::nn {

/// (N, C, D, H, W); W is the fastest axis, matching the volume layout (x fastest).
struct Shape {
  int n = 0, c = 0, d = 0, h = 0, w = 0;

  std::size_t numel() const {
    return static_cast<std::size_t>(n) * c * d * h * w;
  }
  std::size_t spatial() const { return static_cast<std::size_t>(d) * h * w; }
  bool operator==(const Shape&) const = default;
};

std::string to_string(const Shape& s);

class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape s, float fill = 0.0f);

  const Shape& shape() const { return shape_; }
  std::size_t size() const { return data_.size(); }

  std::vector<float>& data() { return data_; }
  const std::vector<float>& data() const { return data_; }
  float& operator[](std::size_t i) { return data_[i]; }
  float operator[](std::size_t i) const { return data_[i]; }

  /// Gradient buffer, allocated (zero) on first access.
  std::vector<float>& grad();
  const std::vector<float>& grad() const { return grad_; }
  bool has_grad() const { return !grad_.empty(); }
  void zero_grad();

  /// Pointer to the first element of sample n, channel c.
  float* channel(int n, int c) { return data_.data() + (static_cast<std::size_t>(n) * shape_.c + c) * shape_.spatial(); }
  const float* channel(int n, int c) const {
    return data_.data() + (static_cast<std::size_t>(n) * shape_.c + c) * shape_.spatial();
  }

 private:
  Shape shape_;
  std::vector<float> data_;
  std::vector<float> grad_;
};

using TensorPtr = std::shared_ptr<Tensor>;

TensorPtr make_tensor(Shape s, float fill = 0.0f);

/// Reverse-mode recorder. Ops append a closure that propagates the output
/// gradient to their inputs; backward() runs them last-to-first.
/// Passing a null Tape to an op disables recording (inference).
class Tape {
 public:
  void record(std::function<void()> fn) { steps_.push_back(std::move(fn)); }
  /// Seeds d(out)/d(out) = 1 for every element of `out` and runs the tape.
  void backward(const TensorPtr& out);
  /// Seeds d(loss)/d(out) with `seed` (one entry per element) and runs the tape.
  void backward(const TensorPtr& out, const std::vector<float>& seed);
  void clear() { steps_.clear(); }
  std::size_t size() const { return steps_.size(); }

 private:
  std::vector<std::function<void()>> steps_;
};

/// Named trainable parameter.
struct Param {
  std::string name;
  TensorPtr tensor;
};

}  // namespace gtvseg::nn
