#include "gtvseg/models/two_stream.hpp"

#include <algorithm>

namespace gtvseg::models {

nn::TensorPtr volumes_to_tensor(const std::vector<const Volume*>& channels) {
  if (channels.empty()) throw Error("volumes_to_tensor: no channels");
  const Geometry& g = channels.front()->geometry();
  for (const Volume* v : channels) {
    if (!(v->geometry() == g)) {
      throw Error("volumes_to_tensor: geometry mismatch " + to_string(v->geometry()) + " vs " +
                  to_string(g));
    }
  }
  auto t = nn::make_tensor({1, static_cast<int>(channels.size()), g.dims.z, g.dims.y, g.dims.x});
  for (std::size_t c = 0; c < channels.size(); ++c) {
    const auto& src = channels[c]->values();
    std::copy(src.begin(), src.end(), t->channel(0, static_cast<int>(c)));
  }
  return t;
}

Volume tensor_to_volume(const nn::Tensor& t, int n, int c, const Geometry& g) {
  const nn::Shape s = t.shape();
  if (s.w != g.dims.x || s.h != g.dims.y || s.d != g.dims.z) {
    throw Error("tensor_to_volume: tensor " + nn::to_string(s) + " does not fit " + to_string(g));
  }
  const float* p = t.channel(n, c);
  return Volume(g, std::vector<float>(p, p + s.spatial()));
}

Volume two_stream_predict(TwoStreamModel& m, const Volume& pct, const Volume* pet) {
  const Geometry& g = pct.geometry();
  if (!pet) {
    const auto out = m.pct_model.forward(nullptr, volumes_to_tensor({&pct}), false);
    return tensor_to_volume(*out.maps.back(), 0, 0, g);
  }
  if (!(pet->geometry() == g)) {
    throw Error("two_stream_predict: PET geometry " + to_string(pet->geometry()) +
                " differs from pCT " + to_string(g));
  }
  const auto early = m.early_model.forward(nullptr, volumes_to_tensor({&pct, pet}), false);
  const Volume pe = tensor_to_volume(*early.maps.back(), 0, 0, g);
  const auto late = m.late_model.forward(nullptr, volumes_to_tensor({&pct, pet, &pe}), false);
  return tensor_to_volume(*late.maps.back(), 0, 0, g);
}

}  // namespace gtvseg::models
