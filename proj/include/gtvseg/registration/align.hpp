#pragma once

#include "gtvseg/registration/deeds.hpp"

namespace gtvseg::reg {

struct CtPairRegistration {
  Vec3 init;               // lung mass-center translation, mm
  DeformationField field;  // on the pCT grid, includes init
};

/// Lung segmentation on both CTs, mass-center initialisation, then
/// deeds_register(pct, diag_ct).
CtPairRegistration register_ct_pair(const Volume& pct, const Volume& diag_ct,
                                    const RegParams& params = {});

/// PET mapped onto the pCT grid through the diagnostic-CT -> pCT field.
Volume align_pet(const Volume& pct, const Volume& diag_ct, const Volume& pet,
                 const RegParams& params = {});

}  // namespace gtvseg::reg
