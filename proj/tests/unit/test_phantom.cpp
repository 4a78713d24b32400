#include <doctest.h>

#include <filesystem>

#include "gtvseg/phantom/cohort.hpp"
#include "gtvseg/phantom/phantom.hpp"
#include "gtvseg/registration/field.hpp"

using namespace gtvseg;
using namespace gtvseg::phantom;

namespace {

PhantomSpec quiet_spec() {
  PhantomSpec s;
  s.seed = 17;
  s.ct_noise_sigma = 0;
  s.pet_noise_sigma = 0;
  return s;
}

double mean_over(const Volume& v, const Mask& m, bool inside) {
  double s = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if ((m[i] != 0) == inside) {
      s += v[i];
      ++n;
    }
  }
  return s / static_cast<double>(n);
}

}  // namespace

TEST_CASE("same spec gives a bit-identical case") {
  PhantomSpec s;
  s.seed = 5;
  const auto a = generate_case(s, "x");
  const auto b = generate_case(s, "x");
  CHECK(a.pct == b.pct);
  CHECK(a.diag_ct == b.diag_ct);
  CHECK(a.pet == b.pet);
  CHECK(a.gt == b.gt);
  CHECK(a.true_field == b.true_field);
}

TEST_CASE("ground truth is nonempty, inside the tube and matches the recorded volume") {
  PhantomSpec s;
  s.seed = 9;
  s.tumor_location = Location::lower;
  const auto c = generate_case(s, "x");
  const Geometry& g = c.gt.geometry();
  std::size_t n = 0;
  const Anatomy& a = anatomy();
  for (std::size_t i = 0; i < c.gt.size(); ++i) {
    if (!c.gt[i]) continue;
    ++n;
    const Vec3 p = g.voxel_to_world(g.unravel(i));
    CHECK(std::hypot(p.x - a.esophagus_x, p.y - a.esophagus_y) <= a.esophagus_radius + s.tumor_radius + 1e-9);
    CHECK(p.z >= a.esophagus_z_lo);
    CHECK(p.z <= a.esophagus_z_hi);
  }
  CHECK(n > 0);
  CHECK(c.meta.volume_mm3 == doctest::Approx(n * 8.0));
  CHECK(c.meta.locations.size() >= 1);
  CHECK(c.pet.geometry() == c.diag_ct.geometry());
  CHECK(c.gt.geometry() == c.pct.geometry());
}

TEST_CASE("pet contrast of one leaves no hotspot and uptake grows with contrast") {
  PhantomSpec s;
  s.seed = 3;
  s.deform = false;
  s.pet_contrast = 1;
  const auto flat = generate_case(s, "x");
  CHECK(mean_over(flat.pet, flat.gt, true) - mean_over(flat.pet, flat.gt, false) < 3 * s.pet_noise_sigma);
  double last = 0;
  for (double pc : {2.0, 3.0, 4.5}) {
    s.pet_contrast = pc;
    const auto c = generate_case(s, "x");
    const double m = mean_over(c.pet, c.gt, true);
    CHECK(m > last);
    last = m;
  }
}

TEST_CASE("warping the diagnostic CT by the true field reproduces the pCT away from edges") {
  const auto c = generate_case(quiet_spec(), "x");
  const Volume back = reg::apply_field(c.true_field, c.diag_ct);
  const Geometry& g = c.pct.geometry();
  double sum = 0;
  std::size_t n = 0;
  for (int k = 1; k < g.dims.z - 1; ++k) {
    for (int j = 1; j < g.dims.y - 1; ++j) {
      for (int i = 1; i < g.dims.x - 1; ++i) {
        // Homogeneous 26-neighbourhood: no intensity edge nearby.
        const float v = c.pct.at(i, j, k);
        bool flat = true;
        for (int dz = -1; dz <= 1 && flat; ++dz)
          for (int dy = -1; dy <= 1 && flat; ++dy)
            for (int dx = -1; dx <= 1 && flat; ++dx) flat = c.pct.at(i + dx, j + dy, k + dz) == v;
        if (!flat || back.at(i, j, k) == kCtBackground) continue;
        sum += std::abs(back.at(i, j, k) - v);
        ++n;
      }
    }
  }
  REQUIRE(n > 10000);
  CHECK(sum / n < 2.0);
}

TEST_CASE("synthetic warp bounds and inverse") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto w = SyntheticWarp::draw(seed);
    CHECK(w.translation.norm() <= 10.0 + 1e-12);
    CHECK(w.amplitude.norm() <= 4.0 + 1e-12);
    for (Vec3 y : {Vec3{0, 0, 0}, Vec3{20, -30, 55}, Vec3{-50, 40, -80}}) {
      const Vec3 x = w.invert(y);
      CHECK((x + w.displacement(x) - y).norm() < 1e-6);
    }
  }
  CHECK(SyntheticWarp::identity().displacement({3, 4, 5}).norm() == 0.0);
}

TEST_CASE("tumor that cannot fit its band is rejected") {
  PhantomSpec s;
  s.tumor_location = Location::lower;
  s.tumor_length = 120;
  CHECK_THROWS_AS(tumor_segments(s), Error);
  s.tumor_location = Location::middle;
  s.tumor_length = 30;
  s.segments = 2;
  const auto segs = tumor_segments(s);
  REQUIRE(segs.size() == 2);
  CHECK(segs[1].first - segs[0].second == doctest::Approx(anatomy().multifocal_gap));
}

TEST_CASE("cT2 draws are strictly smaller in radius and CT contrast") {
  double max_r2 = 0, max_c2 = 0, min_r = 1e9, min_c = 1e9;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto a = draw_spec(TStage::cT2, Location::middle, seed);
    max_r2 = std::max(max_r2, a.tumor_radius);
    max_c2 = std::max(max_c2, a.ct_contrast);
    for (auto st : {TStage::cT3, TStage::cT4}) {
      const auto b = draw_spec(st, Location::middle, seed);
      min_r = std::min(min_r, b.tumor_radius);
      min_c = std::min(min_c, b.ct_contrast);
    }
  }
  CHECK(max_r2 < min_r);
  CHECK(max_c2 < min_c);
}

TEST_CASE("cohort stratum counts") {
  const auto c = allocate_counts({0.21, 0.50, 0.29}, 20);
  CHECK(c == std::vector<std::size_t>{4, 10, 6});
  for (std::size_t n : {1, 7, 30, 41}) {
    const auto k = allocate_counts({0.21, 0.50, 0.29}, n);
    for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(k[i] - n * std::vector<double>{0.21, 0.5, 0.29}[i]) < 1.0);
  }
  CHECK_THROWS_AS(allocate_counts({}, 3), Error);
  CHECK_THROWS_AS(allocate_counts({0, 0}, 3), Error);

  const auto specs = plan_cohort(4, 1, uniform_location_strata());
  std::vector<int> per(4, 0);
  for (const auto& s : specs) per[static_cast<int>(s.tumor_location)]++;
  CHECK(per == std::vector<int>{1, 1, 1, 1});
  const auto stages = plan_cohort(20, 8, default_strata());
  std::vector<int> st(3, 0);
  for (const auto& s : stages) st[static_cast<int>(s.t_stage)]++;
  CHECK(st == std::vector<int>{4, 10, 6});
  CHECK_THROWS_AS(plan_cohort(0, 1, default_strata()), Error);
  CHECK_THROWS_AS(plan_cohort(3, 1, {}), Error);
}

TEST_CASE("same cohort seed gives the same plan, different seeds differ") {
  const auto a = plan_cohort(6, 2, default_strata());
  const auto b = plan_cohort(6, 2, default_strata());
  const auto c = plan_cohort(6, 3, default_strata());
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].seed == b[i].seed);
    CHECK(a[i].tumor_radius == b[i].tumor_radius);
    differs = differs || a[i].seed != c[i].seed;
  }
  CHECK(differs);
  CHECK(case_id(7) == "case_007");
}

TEST_CASE("case save and load round trip") {
  const auto dir = std::filesystem::temp_directory_path() / "gtvseg_unit_case";
  std::filesystem::remove_all(dir);
  PhantomSpec s;
  s.seed = 12;
  s.segments = 2;
  s.tumor_length = 30;
  const auto c = generate_case(s, "case_x");
  save_case(c, dir);
  const auto back = load_case(dir);
  CHECK(back.pct == c.pct);
  CHECK(back.diag_ct == c.diag_ct);
  CHECK(back.pet == c.pet);
  CHECK(back.gt == c.gt);
  CHECK(back.true_field == c.true_field);
  CHECK(back.meta.id == "case_x");
  CHECK(back.meta.spec.segments == 2);
  CHECK(back.meta.locations == c.meta.locations);
  CHECK(back.meta.volume_mm3 == c.meta.volume_mm3);
}

TEST_CASE("stage and location names parse back") {
  for (auto s : kAllStages) CHECK(parse_stage(to_string(s)) == s);
  for (auto l : kAllLocations) CHECK(parse_location(to_string(l)) == l);
  CHECK_THROWS_AS(parse_stage("cT9"), Error);
}
