#pragma once

#include "gtvseg/volcore/volume.hpp"

namespace gtvseg::pipeline {

/// prob > thresh, then 6-connected components smaller than min_component_mm3
/// are removed; every other component is kept.
Mask binarize(const Volume& prob, double thresh = 0.5, double min_component_mm3 = 100.0);

}  // namespace gtvseg::pipeline
