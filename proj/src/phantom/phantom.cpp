#include "gtvseg/phantom/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gtvseg/volcore/io.hpp"
#include "gtvseg/volcore/keyvalue.hpp"
#include "gtvseg/volcore/rng.hpp"
#include "gtvseg/volcore/sampling.hpp"

namespace gtvseg::phantom {
namespace fs = std::filesystem;

std::string to_string(TStage s) {
  switch (s) {
    case TStage::cT2: return "cT2";
    case TStage::cT3: return "cT3";
    case TStage::cT4: return "cT4";
  }
  return "?";
}

std::string to_string(Location l) {
  switch (l) {
    case Location::cervical: return "cervical";
    case Location::upper: return "upper";
    case Location::middle: return "middle";
    case Location::lower: return "lower";
  }
  return "?";
}

TStage parse_stage(const std::string& s) {
  for (TStage t : kAllStages) {
    if (to_string(t) == s) return t;
  }
  throw Error("unknown T stage '" + s + "'");
}

Location parse_location(const std::string& s) {
  for (Location l : kAllLocations) {
    if (to_string(l) == s) return l;
  }
  throw Error("unknown tumor location '" + s + "'");
}

Geometry default_grid() {
  Geometry g;
  g.dims = {64, 64, 96};
  g.spacing = {2, 2, 2};
  g.origin = {-63, -63, -95};
  return g;
}

bool Anatomy::in_body(Vec3 p) const {
  const double u = p.x / body_semi_x;
  const double v = p.y / body_semi_y;
  return u * u + v * v <= 1.0;
}

bool Anatomy::in_lung(Vec3 p, int which) const {
  const Vec3 d = divide(p - lung_center[which], lung_semi);
  return d.x * d.x + d.y * d.y + d.z * d.z <= 1.0;
}

bool Anatomy::in_vertebra(Vec3 p) const {
  const double dx = p.x - spine_x;
  const double dy = p.y - spine_y;
  if (dx * dx + dy * dy > spine_radius * spine_radius) return false;
  const double phase = p.z - vertebra_pitch * std::floor(p.z / vertebra_pitch);
  return phase >= disc_height;
}

std::pair<double, double> Anatomy::band(Location l) const {
  const double quarter = (esophagus_z_hi - esophagus_z_lo) / 4.0;
  const int from_top = static_cast<int>(l);
  const double hi = esophagus_z_hi - from_top * quarter;
  return {hi - quarter, hi};
}

const Anatomy& anatomy() {
  static const Anatomy a;
  return a;
}

void PhantomSpec::validate() const {
  grid.validate();
  if (!(tumor_length > 0)) throw Error("phantom: tumor_length must be positive");
  if (!(tumor_radius > 0)) throw Error("phantom: tumor_radius must be positive");
  if (!(pet_contrast >= 1)) throw Error("phantom: pet_contrast must be >= 1");
  if (segments != 1 && segments != 2) throw Error("phantom: segments must be 1 or 2");
  if (ct_noise_sigma < 0 || pet_noise_sigma < 0) throw Error("phantom: negative noise sigma");
  const Anatomy& a = anatomy();
  const double extent = tumor_length + (segments == 2 ? a.multifocal_gap : 0.0);
  if (extent > a.esophagus_z_hi - a.esophagus_z_lo) {
    throw Error("phantom: tumor does not fit inside the esophagus");
  }
}

std::vector<std::pair<double, double>> tumor_segments(const PhantomSpec& spec) {
  spec.validate();
  const Anatomy& a = anatomy();
  const double extent = spec.tumor_length + (spec.segments == 2 ? a.multifocal_gap : 0.0);
  const auto [band_lo, band_hi] = a.band(spec.tumor_location);
  // The tumor's center must sit inside its band while its extent stays in the esophagus.
  const double lo = std::max(band_lo, a.esophagus_z_lo + extent / 2);
  const double hi = std::min(band_hi, a.esophagus_z_hi - extent / 2);
  if (lo > hi) {
    throw Error("phantom: tumor of extent " + format_double(extent) +
                " mm does not fit in the " + to_string(spec.tumor_location) + " band");
  }
  Rng rng(derive_seed(spec.seed, 101));
  const double center = rng.uniform(lo, hi);
  if (spec.segments == 1) return {{center - extent / 2, center + extent / 2}};
  const double half = spec.tumor_length / 2;
  const double start = center - extent / 2;
  return {{start, start + half}, {start + half + a.multifocal_gap, start + extent}};
}

bool in_tumor(const PhantomSpec& spec, const std::vector<std::pair<double, double>>& segs,
              Vec3 p) {
  const Anatomy& a = anatomy();
  const double dx = p.x - a.esophagus_x;
  const double dy = p.y - a.esophagus_y;
  const double r = a.esophagus_radius + spec.tumor_radius;
  if (dx * dx + dy * dy > r * r) return false;
  return std::any_of(segs.begin(), segs.end(),
                     [&](const auto& s) { return p.z >= s.first && p.z <= s.second; });
}

double ct_intensity(const PhantomSpec& spec, const std::vector<std::pair<double, double>>& segs,
                    Vec3 p) {
  const Anatomy& a = anatomy();
  if (!a.in_body(p)) return a.air_hu;
  if (in_tumor(spec, segs, p)) return a.wall_hu + spec.ct_contrast;
  const double dx = p.x - a.esophagus_x;
  const double dy = p.y - a.esophagus_y;
  if (dx * dx + dy * dy <= a.esophagus_radius * a.esophagus_radius && p.z >= a.esophagus_z_lo &&
      p.z <= a.esophagus_z_hi) {
    return a.wall_hu;
  }
  if (a.in_lung(p, 0) || a.in_lung(p, 1)) return a.lung_hu;
  if (a.in_vertebra(p)) return a.bone_hu;
  return a.body_hu;
}

SyntheticWarp SyntheticWarp::draw(std::uint64_t seed) {
  Rng rng(derive_seed(seed, 202));
  SyntheticWarp w;
  const double t_max = 10.0 / std::sqrt(3.0);
  for (int a = 0; a < 3; ++a) w.translation[a] = rng.uniform(-t_max, t_max);
  for (int a = 0; a < 3; ++a) {
    w.amplitude[a] = rng.uniform(1.0, 2.3);
    // Random direction, wavelength 160-260 mm.
    Vec3 dir{rng.normal(), rng.normal(), rng.normal()};
    dir = dir / std::max(dir.norm(), 1e-12);
    w.wave[a] = dir / rng.uniform(160.0, 260.0);
    w.phase[a] = rng.uniform(0.0, 2.0 * std::numbers::pi);
  }
  return w;
}

SyntheticWarp SyntheticWarp::identity() {
  SyntheticWarp w{};
  return w;
}

Vec3 SyntheticWarp::displacement(Vec3 x) const {
  Vec3 d = translation;
  for (int a = 0; a < 3; ++a) {
    const double arg = 2.0 * std::numbers::pi *
                           (wave[a].x * x.x + wave[a].y * x.y + wave[a].z * x.z) +
                       phase[a];
    d[a] += amplitude[a] * std::sin(arg);
  }
  return d;
}

Vec3 SyntheticWarp::invert(Vec3 y) const {
  Vec3 x = y - translation;
  for (int it = 0; it < 40; ++it) x = y - displacement(x);
  return x;
}

namespace {

// Separable Gaussian blur with edge clamping.
Volume gaussian_blur(const Volume& v, double sigma_mm) {
  Volume out = v;
  const Geometry& g = v.geometry();
  for (int axis = 0; axis < 3; ++axis) {
    const double s = sigma_mm / g.spacing[axis];
    const int radius = static_cast<int>(std::ceil(3 * s));
    std::vector<double> w(2 * radius + 1);
    double total = 0;
    for (int r = -radius; r <= radius; ++r) total += w[r + radius] = std::exp(-0.5 * r * r / (s * s));
    for (auto& x : w) x /= total;
    Volume src = out;
    for (int k = 0; k < g.dims.z; ++k) {
      for (int j = 0; j < g.dims.y; ++j) {
        for (int i = 0; i < g.dims.x; ++i) {
          double acc = 0;
          for (int r = -radius; r <= radius; ++r) {
            Index3 q{i, j, k};
            q[axis] = std::clamp(q[axis] + r, 0, g.dims[axis] - 1);
            acc += w[r + radius] * src.at(q);
          }
          out.at(i, j, k) = static_cast<float>(acc);
        }
      }
    }
  }
  return out;
}

std::string locations_text(const std::vector<Location>& ls) {
  std::string s;
  for (auto l : ls) {
    if (!s.empty()) s += ',';
    s += to_string(l);
  }
  return s;
}

}  // namespace

CaseBundle generate_case(const PhantomSpec& spec, const std::string& id) {
  const auto segs = tumor_segments(spec);
  const Anatomy& a = anatomy();
  const Geometry& g = spec.grid;
  const SyntheticWarp warp = spec.deform ? SyntheticWarp::draw(spec.seed) : SyntheticWarp::identity();

  CaseBundle c;
  c.pct = Volume(g);
  c.gt = Mask(g);
  c.true_field = reg::DeformationField(g);
  Rng pct_noise(derive_seed(spec.seed, 1));
  for (std::size_t n = 0; n < g.voxel_count(); ++n) {
    const Vec3 p = g.voxel_to_world(g.unravel(n));
    c.pct[n] = static_cast<float>(ct_intensity(spec, segs, p) + spec.ct_noise_sigma * pct_noise.normal());
    c.gt[n] = in_tumor(spec, segs, p) ? 1 : 0;
    c.true_field.set(n, warp.displacement(p));
  }

  // PET uptake: smoothed tumor indicator on the pCT grid, pulled into the
  // diagnostic frame through the inverse warp.
  Volume indicator(g);
  for (std::size_t n = 0; n < g.voxel_count(); ++n) indicator[n] = c.gt[n];
  const Volume smooth = gaussian_blur(indicator, 3.0);

  const Geometry& gd = g;
  c.diag_ct = Volume(gd);
  c.pet = Volume(gd);
  Rng diag_noise(derive_seed(spec.seed, 2));
  Rng pet_noise(derive_seed(spec.seed, 3));
  for (std::size_t n = 0; n < gd.voxel_count(); ++n) {
    const Vec3 x = warp.invert(gd.voxel_to_world(gd.unravel(n)));
    c.diag_ct[n] = static_cast<float>(ct_intensity(spec, segs, x) + spec.ct_noise_sigma * diag_noise.normal());
    const double s = sample_trilinear(smooth, x, 0.0f);
    c.pet[n] = static_cast<float>(1.0 + (spec.pet_contrast - 1.0) * s +
                                  spec.pet_noise_sigma * pet_noise.normal());
  }

  c.meta.id = id;
  c.meta.t_stage = spec.t_stage;
  c.meta.requested_location = spec.tumor_location;
  c.meta.spec = spec;
  c.meta.tumor_z_lo = segs.front().first;
  c.meta.tumor_z_hi = segs.back().second;
  for (Location l : kAllLocations) {
    const auto [lo, hi] = a.band(l);
    const bool overlaps = std::any_of(segs.begin(), segs.end(), [&](const auto& s) {
      return s.first < hi && s.second > lo;
    });
    if (overlaps) c.meta.locations.push_back(l);
  }
  c.meta.volume_mm3 = mask_volume_mm3(c.gt);
  if (c.meta.volume_mm3 <= 0) throw Error("phantom: tumor covers no voxel of the grid");
  return c;
}

Mask esophagus_region(const Geometry& g, double radius_mm) {
  const Anatomy& a = anatomy();
  Mask m(g);
  for (std::size_t n = 0; n < m.size(); ++n) {
    const Vec3 p = g.voxel_to_world(g.unravel(n));
    const double dx = p.x - a.esophagus_x, dy = p.y - a.esophagus_y;
    m[n] = dx * dx + dy * dy <= radius_mm * radius_mm && p.z >= a.esophagus_z_lo &&
           p.z <= a.esophagus_z_hi;
  }
  return m;
}

void save_case(const CaseBundle& c, const fs::path& dir) {
  fs::create_directories(dir);
  save_volume(c.pct, dir / "pct");
  save_volume(c.diag_ct, dir / "diag_ct");
  save_volume(c.pet, dir / "pet");
  save_mask(c.gt, dir / "gt");
  reg::save_field(c.true_field, dir / "true_field");
  const PhantomSpec& s = c.meta.spec;
  KeyValues kv;
  kv.add("id", c.meta.id);
  kv.add("t_stage", to_string(c.meta.t_stage));
  kv.add("location", to_string(c.meta.requested_location));
  kv.add("locations", locations_text(c.meta.locations));
  kv.add("volume_mm3", format_double(c.meta.volume_mm3));
  kv.add("tumor_z_lo", format_double(c.meta.tumor_z_lo));
  kv.add("tumor_z_hi", format_double(c.meta.tumor_z_hi));
  kv.add("seed", std::to_string(s.seed));
  kv.add("tumor_length", format_double(s.tumor_length));
  kv.add("tumor_radius", format_double(s.tumor_radius));
  kv.add("pet_contrast", format_double(s.pet_contrast));
  kv.add("ct_contrast", format_double(s.ct_contrast));
  kv.add("segments", std::to_string(s.segments));
  kv.add("ct_noise_sigma", format_double(s.ct_noise_sigma));
  kv.add("pet_noise_sigma", format_double(s.pet_noise_sigma));
  kv.add("deform", s.deform ? "1" : "0");
  kv.write_file(dir / "meta.txt");
}

CaseMeta read_meta(const fs::path& dir) {
  const KeyValues kv = KeyValues::read_file(dir / "meta.txt");
  CaseMeta m;
  m.id = kv.get("id");
  m.t_stage = parse_stage(kv.get("t_stage"));
  m.requested_location = parse_location(kv.get("location"));
  for (const auto& l : split(kv.get("locations"), ',')) {
    if (!trim(l).empty()) m.locations.push_back(parse_location(trim(l)));
  }
  m.volume_mm3 = parse_double(kv.get("volume_mm3"));
  m.tumor_z_lo = parse_double(kv.get("tumor_z_lo"));
  m.tumor_z_hi = parse_double(kv.get("tumor_z_hi"));
  PhantomSpec& s = m.spec;
  s.seed = static_cast<std::uint64_t>(std::stoull(kv.get("seed")));
  s.t_stage = m.t_stage;
  s.tumor_location = m.requested_location;
  s.tumor_length = parse_double(kv.get("tumor_length"));
  s.tumor_radius = parse_double(kv.get("tumor_radius"));
  s.pet_contrast = parse_double(kv.get("pet_contrast"));
  s.ct_contrast = parse_double(kv.get("ct_contrast"));
  s.segments = static_cast<int>(parse_int(kv.get("segments")));
  s.ct_noise_sigma = parse_double(kv.get("ct_noise_sigma"));
  s.pet_noise_sigma = parse_double(kv.get("pet_noise_sigma"));
  s.deform = parse_bool(kv.get("deform"));
  return m;
}

CaseBundle load_case(const fs::path& dir) {
  CaseBundle c;
  c.pct = load_volume(dir / "pct");
  c.diag_ct = load_volume(dir / "diag_ct");
  c.pet = load_volume(dir / "pet");
  c.gt = load_mask(dir / "gt");
  c.true_field = reg::load_field(dir / "true_field");
  c.meta = read_meta(dir);
  c.meta.spec.grid = c.pct.geometry();
  return c;
}

}  // namespace gtvseg::phantom
