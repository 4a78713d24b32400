#pragma once

#include <vector>

#include "gtvseg/registration/field.hpp"

namespace gtvseg::reg {

/// Discretisation of the coarse-to-fine block search. Level 0 is the coarsest;
/// level l works on images box-downsampled by 2^(levels-1-l).
struct RegParams {
  int levels = 3;
  int block = 8;                                   // block edge, in level voxels
  std::vector<double> search_radius_mm{12, 6, 3};  // per level
  std::vector<double> quant_mm{4, 2, 1};           // per level
  double alpha = 1.0;                              // neighbour-mean penalty weight
  int smoothing_sweeps = 5;                        // regulariser fixed-point sweeps per level
  double intensity_scale = 100.0;                  // HU per unit of the data term
  int threads = 1;

  /// Throws Error unless levels >= 1, per-level vectors sized `levels`,
  /// radii and quantisation positive and quant <= radius.
  void validate() const;
};

/// Dense-displacement-sampling registration of `moving` onto `fixed`.
///
/// For every block of every level the mean squared intensity difference is
/// evaluated exhaustively over the cube of displacements {-R, ..., R} (step q)
/// around the prior field (the upsampled previous level, or `init` at the
/// coarsest level). The choice per block minimises data cost plus
/// alpha * |(d - mean of 6 neighbour choices) / q|^2, solved by synchronous
/// fixed-point sweeps. Block offsets get one 3x3x3 box-average pass and are
/// trilinearly interpolated onto the level grid. The returned field lives on
/// `fixed`'s grid and includes `init`.
///
/// Throws Error when any fixed dimension is smaller than the block edge.
DeformationField deeds_register(const Volume& fixed, const Volume& moving, Vec3 init,
                                const RegParams& params = {});

/// Box-average downsampling by an integer factor; the output voxel centers sit
/// at the centers of the averaged blocks (partial blocks at the far edge).
Volume downsample_box(const Volume& v, int factor);

}  // namespace gtvseg::reg
