#pragma once

#include "gtvseg/volcore/volume.hpp"

namespace gtvseg::reg {

inline constexpr float kLungThresholdHu = -400.0f;

/// Lung mask from a CT in HU: threshold below -400 HU, 6-connected labelling,
/// drop components touching the x/y faces of the grid (air around the body),
/// keep the two largest of the rest and fill holes slice by slice.
/// Throws Error when fewer than two candidate components remain.
Mask segment_lungs(const Volume& ct);

/// Mean world position of the set voxels. Throws Error on an empty mask.
Vec3 mass_center(const Mask& m);

/// Translation (mm) taking the fixed lung center onto the moving lung center.
Vec3 rigid_init(const Mask& fixed_lungs, const Mask& moving_lungs);

}  // namespace gtvseg::reg
