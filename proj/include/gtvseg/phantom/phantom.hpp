#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gtvseg/registration/field.hpp"
#include "gtvseg/volcore/volume.hpp"

namespace gtvseg::phantom {

enum class TStage { cT2, cT3, cT4 };
enum class Location { cervical, upper, middle, lower };

inline constexpr TStage kAllStages[] = {TStage::cT2, TStage::cT3, TStage::cT4};
inline constexpr Location kAllLocations[] = {Location::cervical, Location::upper,
                                             Location::middle, Location::lower};

std::string to_string(TStage s);
std::string to_string(Location l);
TStage parse_stage(const std::string& s);
Location parse_location(const std::string& s);

/// Default pCT grid: 64x64x96 voxels at 2 mm, centered on the world origin.
Geometry default_grid();

/// Fixed synthetic anatomy in world mm (grid centered at the origin, z superior).
struct Anatomy {
  double body_semi_x = 60, body_semi_y = 50;  // elliptic cylinder along z
  Vec3 lung_center[2] = {{-32, 0, 0}, {32, 0, 0}};
  Vec3 lung_semi{16, 28, 80};
  double esophagus_x = 0, esophagus_y = 16;
  double esophagus_radius = 5;
  double esophagus_z_lo = -86, esophagus_z_hi = 86;
  // Spine posterior to the esophagus: vertebral bodies separated by discs.
  double spine_x = 0, spine_y = 40, spine_radius = 7;
  double vertebra_pitch = 24, disc_height = 6;
  double body_hu = 40, lung_hu = -800, air_hu = -1000, wall_hu = 60, bone_hu = 300;
  double multifocal_gap = 12;  // mm between the two segments of a split tumor

  bool in_body(Vec3 p) const;
  bool in_lung(Vec3 p, int which) const;
  bool in_vertebra(Vec3 p) const;
  /// z range [lo, hi) of a location band: four equal quarters of the
  /// esophagus, cervical at the top.
  std::pair<double, double> band(Location l) const;
};

const Anatomy& anatomy();

/// Voxels within `radius_mm` of the esophagus axis, inside its z extent.
Mask esophagus_region(const Geometry& g, double radius_mm = 15);

struct PhantomSpec {
  std::uint64_t seed = 0;
  Geometry grid = default_grid();
  Location tumor_location = Location::middle;
  TStage t_stage = TStage::cT3;
  double tumor_length = 40;  // mm, total over both segments when multifocal
  double tumor_radius = 6;   // mm of wall thickening
  double pet_contrast = 4;   // tumor-to-background uptake ratio
  double ct_contrast = 30;   // HU above the esophageal wall
  int segments = 1;          // 2 = multifocal (tumor_length split in halves)
  double ct_noise_sigma = 10;
  double pet_noise_sigma = 0.05;
  bool deform = true;        // false: diag_ct on the identity mapping

  void validate() const;
};

struct CaseMeta {
  std::string id;
  TStage t_stage = TStage::cT3;
  Location requested_location = Location::middle;
  std::vector<Location> locations;  // every band the tumor overlaps
  double volume_mm3 = 0;
  double tumor_z_lo = 0, tumor_z_hi = 0;
  PhantomSpec spec;
};

struct CaseBundle {
  Volume pct;
  Volume diag_ct;
  Volume pet;  // on diag_ct geometry
  Mask gt;     // on pct geometry
  reg::DeformationField true_field;  // pull-back pCT -> diagnostic CT
  CaseMeta meta;
};

/// Z extents of the tumor segment(s) for a spec; throws Error when the tumor
/// cannot be centered in its location band while staying inside the esophagus.
std::vector<std::pair<double, double>> tumor_segments(const PhantomSpec& spec);

/// Noise-free pCT intensity at a world point for the given tumor segments.
double ct_intensity(const PhantomSpec& spec, const std::vector<std::pair<double, double>>& segs,
                    Vec3 p);
bool in_tumor(const PhantomSpec& spec, const std::vector<std::pair<double, double>>& segs,
              Vec3 p);

/// Smooth synthetic pose + low-frequency deformation drawn from the spec seed:
/// translation |t| <= 10 mm plus per-axis sinusoids of amplitude <= 2.3 mm
/// (vector amplitude <= 4 mm).
struct SyntheticWarp {
  Vec3 translation;
  Vec3 amplitude;
  Vec3 wave[3];  // cycles per mm, per displacement component
  Vec3 phase;

  static SyntheticWarp draw(std::uint64_t seed);
  static SyntheticWarp identity();
  Vec3 displacement(Vec3 x) const;
  /// Solves y = x + displacement(x) for x by fixed-point iteration.
  Vec3 invert(Vec3 y) const;
};

CaseBundle generate_case(const PhantomSpec& spec, const std::string& id = "case");

void save_case(const CaseBundle& c, const std::filesystem::path& dir);
CaseBundle load_case(const std::filesystem::path& dir);
CaseMeta read_meta(const std::filesystem::path& dir);

}  // namespace gtvseg::phantom
