#include "gtvseg/registration/align.hpp"

#include "gtvseg/registration/lungs.hpp"

namespace gtvseg::reg {

CtPairRegistration register_ct_pair(const Volume& pct, const Volume& diag_ct,
                                    const RegParams& params) {
  const Vec3 init = rigid_init(segment_lungs(pct), segment_lungs(diag_ct));
  return {init, deeds_register(pct, diag_ct, init, params)};
}

Volume align_pet(const Volume& pct, const Volume& diag_ct, const Volume& pet,
                 const RegParams& params) {
  const auto reg = register_ct_pair(pct, diag_ct, params);
  return apply_field(reg.field, pet, Interp::trilinear, kPetBackground);
}

}  // namespace gtvseg::reg
