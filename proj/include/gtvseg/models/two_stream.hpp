#pragma once

#include <optional>
#include <vector>

#include "gtvseg/models/psnn.hpp"
#include "gtvseg/volcore/volume.hpp"

namespace gtvseg::models {

/// Stacks same-geometry volumes as channels of a (1, C, z, y, x) tensor.
nn::TensorPtr volumes_to_tensor(const std::vector<const Volume*>& channels);
/// Channel `c` of sample `n` as a volume on `g`.
Volume tensor_to_volume(const nn::Tensor& t, int n, int c, const Geometry& g);

struct TwoStreamModel {
  Psnn pct_model;    // input: pCT
  Psnn early_model;  // input: pCT, PET
  Psnn late_model;   // input: pCT, PET, early probability
};

/// Whole-volume prediction from normalized inputs. Without PET the pCT
/// stream's finest map is returned; with PET the early map feeds the late model.
Volume two_stream_predict(TwoStreamModel& m, const Volume& pct,
                          const Volume* pet = nullptr);

}  // namespace gtvseg::models
