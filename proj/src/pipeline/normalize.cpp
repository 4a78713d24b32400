#include "gtvseg/pipeline/normalize.hpp"

#include <algorithm>
#include <cmath>

namespace gtvseg::pipeline {

double percentile(std::vector<float> values, double q) {
  if (values.empty()) throw Error("percentile of an empty list");
  if (!(q >= 0 && q <= 1)) throw Error("percentile q must lie in [0, 1]");
  const double h = (values.size() - 1) * q;
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  std::nth_element(values.begin(), values.begin() + lo, values.end());
  const double a = values[lo];
  if (lo + 1 >= values.size()) return a;
  const double b = *std::min_element(values.begin() + lo + 1, values.end());
  return a + (h - static_cast<double>(lo)) * (b - a);
}

Volume normalize_ct(const Volume& ct) {
  Volume out(ct.geometry());
  for (std::size_t i = 0; i < ct.size(); ++i) {
    const double v = std::clamp(static_cast<double>(ct[i]), kCtClampLo, kCtClampHi);
    out[i] = static_cast<float>((v - kCtClampLo) / (kCtClampHi - kCtClampLo));
  }
  return out;
}

Volume normalize_pet(const Volume& pet) {
  Volume out(pet.geometry());
  const double p99 = percentile(pet.values(), 0.99);
  if (!(p99 > 0)) return out;
  for (std::size_t i = 0; i < pet.size(); ++i) {
    out[i] = static_cast<float>(std::clamp(pet[i] / p99, 0.0, 1.0));
  }
  return out;
}

std::vector<Volume> normalize_inputs(const Volume& pct, const Volume* pet) {
  std::vector<Volume> out{normalize_ct(pct)};
  if (pet) {
    if (!(pet->geometry() == pct.geometry())) {
      throw Error("normalize_inputs: PET must be aligned to the pCT grid");
    }
    out.push_back(normalize_pet(*pet));
  }
  return out;
}

}  // namespace gtvseg::pipeline
