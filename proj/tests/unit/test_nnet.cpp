#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "../common/gradcheck.hpp"
#include "gtvseg/nnet/checkpoint.hpp"
#include "gtvseg/nnet/loss.hpp"
#include "gtvseg/nnet/ops.hpp"
#include "gtvseg/nnet/optim.hpp"

using namespace gtvseg;
using namespace gtvseg::nn;

namespace {

double channel_mean(const Tensor& t, int c) {
  double s = 0;
  for (int n = 0; n < t.shape().n; ++n)
    for (std::size_t v = 0; v < t.shape().spatial(); ++v) s += t.channel(n, c)[v];
  return s / (t.shape().n * t.shape().spatial());
}

double channel_var(const Tensor& t, int c) {
  const double m = channel_mean(t, c);
  double s = 0;
  for (int n = 0; n < t.shape().n; ++n)
    for (std::size_t v = 0; v < t.shape().spatial(); ++v) s += (t.channel(n, c)[v] - m) * (t.channel(n, c)[v] - m);
  return s / (t.shape().n * t.shape().spatial());
}

}  // namespace

TEST_CASE("identity kernel convolution returns the input") {
  Rng rng(1);
  const auto x = gradcheck::random_tensor(rng, {2, 1, 4, 5, 6});
  auto w = make_tensor({1, 1, 3, 3, 3});
  (*w)[13] = 1.0f;
  const auto y = conv3d(nullptr, x, w, nullptr);
  CHECK(y->data() == x->data());
}

TEST_CASE("all-ones kernel on a constant input counts in-bounds neighbours") {
  const auto x = make_tensor({1, 1, 4, 4, 4}, 2.0f);
  const auto w = make_tensor({1, 1, 3, 3, 3}, 1.0f);
  const auto y = conv3d(nullptr, x, w, nullptr);
  auto at = [&](int z, int yy, int xx) { return (*y)[(z * 4 + yy) * 4 + xx]; };
  CHECK(at(1, 2, 1) == 54.0f);
  CHECK(at(0, 0, 0) == 16.0f);
  CHECK(at(0, 0, 1) == 24.0f);
  CHECK(at(0, 1, 1) == 36.0f);
  const auto b = make_tensor({1, 1, 1, 1, 1}, -4.0f);
  CHECK((*conv3d(nullptr, x, w, b))[21] == 50.0f);
}

TEST_CASE("conv3d rejects channel mismatch and shape is preserved") {
  const auto x = make_tensor({1, 2, 4, 4, 4});
  CHECK_THROWS_AS(conv3d(nullptr, x, make_tensor({3, 1, 3, 3, 3}), nullptr), Error);
  CHECK(conv3d(nullptr, x, make_tensor({3, 2, 3, 3, 3}), nullptr)->shape() == Shape{1, 3, 4, 4, 4});
  CHECK(conv3d(nullptr, x, make_tensor({3, 2, 1, 1, 1}), nullptr)->shape() == Shape{1, 3, 4, 4, 4});
}

TEST_CASE("finite-difference checks of the individual ops") {
  for (std::uint64_t seed : {0u, 1u, 2u}) {
    CAPTURE(seed);
    CHECK(gradcheck::conv3d(seed) < 1e-3);
    CHECK(gradcheck::conv3d(seed, 1) < 1e-3);
    CHECK(gradcheck::batchnorm3d(seed) < 1e-3);
    CHECK(gradcheck::upsample2x(seed) < 1e-3);
    CHECK(gradcheck::maxpool2x(seed) < 1e-3);
    CHECK(gradcheck::dice_bce(seed) < 1e-3);
  }
}

TEST_CASE("batch norm statistics and running averages") {
  Rng rng(3);
  const auto x = gradcheck::random_tensor(rng, {2, 2, 3, 4, 4}, 3.0);
  for (int c = 0; c < 2; ++c)
    for (int n = 0; n < 2; ++n)
      for (std::size_t v = 0; v < 48; ++v) x->channel(n, c)[v] += 5.0f * (c + 1);
  BatchNorm bn(2);
  const auto y = batchnorm3d(nullptr, x, bn, true);
  for (int c = 0; c < 2; ++c) {
    CHECK(std::abs(channel_mean(*y, c)) < 1e-4);
    CHECK(std::abs(channel_var(*y, c) - 1.0) < 1e-4);
    const double m = channel_mean(*x, c);
    const double unbiased = channel_var(*x, c) * 96.0 / 95.0;
    CHECK(bn.running_mean[c] == doctest::Approx(0.1 * m).epsilon(1e-5));
    CHECK(bn.running_var[c] == doctest::Approx(0.9 + 0.1 * unbiased).epsilon(1e-5));
  }

  BatchNorm affine(2);
  (*affine.gamma)[0] = (*affine.gamma)[1] = 2.0f;
  (*affine.beta)[0] = (*affine.beta)[1] = 3.0f;
  const auto z = batchnorm3d(nullptr, y, affine, true);
  for (int c = 0; c < 2; ++c) {
    CHECK(std::abs(channel_mean(*z, c) - 3.0) < 1e-4);
    CHECK(std::abs(std::sqrt(channel_var(*z, c)) - 2.0) < 1e-4);
  }

  BatchNorm ev(1);
  ev.running_mean = {1.0f};
  ev.running_var = {4.0f};
  const auto e = batchnorm3d(nullptr, make_tensor({1, 1, 1, 1, 2}, 5.0f), ev, false);
  CHECK((*e)[0] == doctest::Approx(4.0 / std::sqrt(4.0 + 1e-5)));
  CHECK(ev.running_mean[0] == 1.0f);

  CHECK_THROWS_AS(batchnorm3d(nullptr, make_tensor({1, 1, 1, 1, 1}), ev, true), Error);
  CHECK_THROWS_AS(batchnorm3d(nullptr, make_tensor({1, 2, 2, 2, 2}), ev, true), Error);
}

TEST_CASE("relu, maxpool and upsample definitions") {
  auto x = make_tensor({1, 1, 1, 1, 2});
  (*x)[0] = -1.0f;
  (*x)[1] = 2.0f;
  const auto r = relu(nullptr, x);
  CHECK((*r)[0] == 0.0f);
  CHECK((*r)[1] == 2.0f);

  const auto c = make_tensor({1, 2, 4, 6, 2}, 1.5f);
  const auto p = maxpool2x(nullptr, c);
  CHECK(p->shape() == Shape{1, 2, 2, 3, 1});
  for (float v : p->data()) CHECK(v == 1.5f);
  CHECK_THROWS_AS(maxpool2x(nullptr, make_tensor({1, 1, 3, 4, 4})), Error);

  const auto u = upsample2x(nullptr, c);
  CHECK(u->shape() == Shape{1, 2, 8, 12, 4});
  for (float v : u->data()) CHECK(v == 1.5f);

  // Half-voxel convention on a 1-D ramp: outputs at source coordinates -0.25, 0.25, 0.75, ...
  auto ramp = make_tensor({1, 1, 1, 1, 3});
  (*ramp)[0] = 0;
  (*ramp)[1] = 4;
  (*ramp)[2] = 8;
  const auto ur = upsample2x(nullptr, ramp);
  const std::vector<float> expect{0, 1, 3, 5, 7, 8};
  for (int i = 0; i < 6; ++i) CHECK((*ur)[i] == doctest::Approx(expect[i]));
}

TEST_CASE("upsample of maxpool on a 2-periodic input") {
  // Every 2x2x2 cell of a 2-periodic input holds the same values, so the pooled
  // map is constant at the cell maximum and upsampling reproduces that constant.
  Rng rng(5);
  float cell[8];
  for (float& v : cell) v = static_cast<float>(rng.normal());
  const float mx = *std::max_element(cell, cell + 8);
  auto x = make_tensor({1, 1, 8, 8, 8});
  for (int z = 0; z < 8; ++z)
    for (int y = 0; y < 8; ++y)
      for (int xx = 0; xx < 8; ++xx) (*x)[(z * 8 + y) * 8 + xx] = cell[(z % 2) * 4 + (y % 2) * 2 + xx % 2];
  const auto back = upsample2x(nullptr, maxpool2x(nullptr, x));
  for (float v : back->data()) CHECK(v == mx);

  const auto k = make_tensor({1, 1, 4, 4, 4}, -2.5f);
  CHECK(upsample2x(nullptr, maxpool2x(nullptr, k))->data() == k->data());
}

TEST_CASE("dice-bce loss closed forms") {
  Tensor target({1, 1, 2, 2, 2});
  auto logits = make_tensor({1, 1, 2, 2, 2});
  for (std::size_t i = 0; i < 8; ++i) {
    target[i] = i % 3 == 0 ? 1.0f : 0.0f;
    (*logits)[i] = target[i] > 0 ? 20.0f : -20.0f;
  }
  CHECK((*dice_bce_loss(nullptr, logits, target))[0] < 1e-3);

  const Tensor zeros({1, 1, 4, 4, 4});
  const auto flat = make_tensor({1, 1, 4, 4, 4});
  const double V = 64;
  const double expect = 0.5 * (1.0 - 1.0 / (0.5 * V + 1.0)) + 0.5 * std::log(2.0);
  CHECK((*dice_bce_loss(nullptr, flat, zeros))[0] == doctest::Approx(expect).epsilon(1e-6));
  CHECK_THROWS_AS(dice_bce_loss(nullptr, flat, target), Error);

  Rng rng(8);
  const auto any = gradcheck::random_tensor(rng, {1, 1, 2, 2, 2}, 3.0);
  CHECK((*dice_bce_loss(nullptr, any, target))[0] > 0.0f);
}

TEST_CASE("poly schedule and Nesterov update") {
  PolySchedule s{0.01, 0.9, 100};
  CHECK(s.lr(0) == 0.01);
  CHECK(s.lr(99) == doctest::Approx(0.01 * std::pow(1.0 / 100, 0.9)));
  CHECK_THROWS_AS(s.lr(100), Error);
  CHECK_THROWS_AS(s.lr(-1), Error);

  auto p = make_tensor({1, 1, 1, 1, 2});
  (*p)[0] = 1.0f;
  (*p)[1] = -2.0f;
  SgdNesterov vanilla({{"p", p}}, s, 0.0);
  p->grad() = {0.5f, -1.0f};
  vanilla.step(0);
  CHECK((*p)[0] == doctest::Approx(1.0 - 0.01 * 0.5));
  CHECK((*p)[1] == doctest::Approx(-2.0 + 0.01));
  CHECK_THROWS_AS(vanilla.step(100), Error);

  auto q = make_tensor({1, 1, 1, 1, 1}, 1.0f);
  SgdNesterov nesterov({{"q", q}}, s, 0.9);
  q->grad() = {1.0f};
  nesterov.step(0);
  double v = -0.01, expect = 1.0 + 0.9 * v - 0.01;
  CHECK((*q)[0] == doctest::Approx(expect));
  nesterov.step(1);
  const double lr1 = s.lr(1);
  v = 0.9 * v - lr1;
  expect += 0.9 * v - lr1;
  CHECK((*q)[0] == doctest::Approx(expect));
  nesterov.zero_grad();
  CHECK(q->grad()[0] == 0.0f);
}

TEST_CASE("seeded backward checks the seed length") {
  Tape tape;
  const auto x = make_tensor({1, 1, 1, 1, 2}, 1.0f);
  const auto y = relu(&tape, x);
  CHECK_THROWS_AS(tape.backward(y, {1.0f}), Error);
  tape.backward(y, {2.0f, 3.0f});
  CHECK(x->grad() == std::vector<float>{2.0f, 3.0f});
}

TEST_CASE("checkpoint round trip") {
  const auto dir = std::filesystem::temp_directory_path() / "gtvseg_unit_ckpt";
  std::filesystem::create_directories(dir);
  KeyValues meta;
  meta.add("format", "test");
  std::vector<NamedArray> arrays{{"a", {1, 2, 1, 1, 3}, {1, 2, 3, 4, 5, 6}}, {"b", {1, 1, 1, 1, 1}, {-0.125f}}};
  save_checkpoint(dir / "m", meta, arrays);
  const auto ck = load_checkpoint(dir / "m");
  CHECK(ck.meta.get("format") == "test");
  REQUIRE(ck.arrays.size() == 2);
  CHECK(ck.get("a").values == arrays[0].values);
  CHECK(ck.get("a").shape == arrays[0].shape);
  CHECK(ck.get("b").values == arrays[1].values);
  CHECK_THROWS_AS(ck.get("c"), Error);
}
