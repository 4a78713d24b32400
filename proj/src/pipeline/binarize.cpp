#include "gtvseg/pipeline/binarize.hpp"

#include "gtvseg/volcore/components.hpp"

namespace gtvseg::pipeline {

Mask binarize(const Volume& prob, double thresh, double min_component_mm3) {
  Mask m(prob.geometry());
  for (std::size_t i = 0; i < prob.size(); ++i) m[i] = prob[i] > thresh ? 1 : 0;
  const Components comps = label_components(m);
  const double vv = prob.geometry().voxel_volume();
  std::vector<int> keep;
  for (std::size_t c = 0; c < comps.count(); ++c) {
    if (static_cast<double>(comps.sizes[c]) * vv >= min_component_mm3) keep.push_back(static_cast<int>(c + 1));
  }
  return select_components(comps, keep);
}

}  // namespace gtvseg::pipeline
