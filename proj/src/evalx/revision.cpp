#include "gtvseg/evalx/revision.hpp"

#include "gtvseg/volcore/geometry.hpp"

namespace gtvseg::eval {

std::string to_string(RevisionCategory c) {
  switch (c) {
    case RevisionCategory::none: return "none";
    case RevisionCategory::lt10: return "lt10";
    case RevisionCategory::ge10_lt30: return "ge10_lt30";
    case RevisionCategory::ge30_le60: return "ge30_le60";
    case RevisionCategory::unacceptable: return "unacceptable";
  }
  return "?";
}

RevisionCategory parse_category(const std::string& s) {
  for (auto c : kAllCategories) {
    if (to_string(c) == s) return c;
  }
  throw Error("unknown revision category '" + s + "'");
}

double slice_dsc(const Mask& pred, const Mask& gt, int z) {
  if (!(pred.geometry() == gt.geometry())) throw Error("slice_dsc: grids differ");
  const Geometry& g = gt.geometry();
  if (z < 0 || z >= g.dims.z) throw Error("slice_dsc: slice " + std::to_string(z) + " out of range");
  const std::size_t plane = static_cast<std::size_t>(g.dims.x) * g.dims.y;
  const std::size_t base = plane * static_cast<std::size_t>(z);
  std::size_t a = 0, b = 0, both = 0;
  for (std::size_t i = base; i < base + plane; ++i) {
    const bool p = pred[i] != 0, t = gt[i] != 0;
    a += p;
    b += t;
    both += p && t;
  }
  if (a + b == 0) return 1.0;
  return 2.0 * static_cast<double>(both) / static_cast<double>(a + b);
}

RevisionCategory categorize(double f) {
  if (f < 0 || f > 1) throw Error("revised fraction must be in [0, 1]");
  if (f == 0) return RevisionCategory::none;
  if (f < 0.1) return RevisionCategory::lt10;
  if (f < 0.3) return RevisionCategory::ge10_lt30;
  if (f <= 0.6) return RevisionCategory::ge30_le60;
  return RevisionCategory::unacceptable;
}

Revision revision_degree(const Mask& pred, const Mask& gt, double tau) {
  if (!(pred.geometry() == gt.geometry())) throw Error("revision_degree: grids differ");
  if (count_set(gt) == 0) throw Error("revision_degree: ground truth is empty");
  const Geometry& g = gt.geometry();
  const std::size_t plane = static_cast<std::size_t>(g.dims.x) * g.dims.y;
  Revision r;
  bool overlap = false;
  for (int z = 0; z < g.dims.z; ++z) {
    bool any = false;
    for (std::size_t i = plane * z; i < plane * (z + 1); ++i) {
      any = any || pred[i] || gt[i];
      overlap = overlap || (pred[i] && gt[i]);
    }
    if (!any) continue;
    ++r.relevant_slices;
    if (slice_dsc(pred, gt, z) < tau) ++r.failing_slices;
  }
  r.revised_fraction = static_cast<double>(r.failing_slices) / static_cast<double>(r.relevant_slices);
  r.no_overlap = !overlap;
  r.category = r.no_overlap ? RevisionCategory::unacceptable : categorize(r.revised_fraction);
  return r;
}

bool is_unacceptable(const Mask& pred, const Mask& gt, double tau) {
  return revision_degree(pred, gt, tau).category == RevisionCategory::unacceptable;
}

}  // namespace gtvseg::eval
