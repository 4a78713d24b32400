#pragma once

#include <string>

#include "gtvseg/volcore/volume.hpp"

namespace gtvseg::eval {

enum class RevisionCategory { none, lt10, ge10_lt30, ge30_le60, unacceptable };
inline constexpr RevisionCategory kAllCategories[] = {
    RevisionCategory::none, RevisionCategory::lt10, RevisionCategory::ge10_lt30,
    RevisionCategory::ge30_le60, RevisionCategory::unacceptable};

std::string to_string(RevisionCategory c);
RevisionCategory parse_category(const std::string& s);

struct Revision {
  double revised_fraction = 0;   // failing / relevant slices
  std::size_t relevant_slices = 0;  // axial slices where GT or prediction is set
  std::size_t failing_slices = 0;   // relevant slices with slice DSC < tau
  bool no_overlap = false;
  RevisionCategory category = RevisionCategory::none;
};

/// DSC restricted to axial slice z.
double slice_dsc(const Mask& pred, const Mask& gt, int z);

/// 0 -> none, (0, 0.1) -> lt10, [0.1, 0.3) -> ge10_lt30, [0.3, 0.6] -> ge30_le60,
/// above 0.6 -> unacceptable.
RevisionCategory categorize(double revised_fraction);

/// Simulated per-slice revision. A prediction with no voxel overlapping the GT
/// is unacceptable regardless of the fraction. Throws on an empty GT.
Revision revision_degree(const Mask& pred, const Mask& gt, double tau = 0.7);
bool is_unacceptable(const Mask& pred, const Mask& gt, double tau = 0.7);

}  // namespace gtvseg::eval
