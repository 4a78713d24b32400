#include <doctest.h>

#include <cmath>
#include <numeric>

#include "../common/oracles.hpp"
#include "gtvseg/evalx/metrics.hpp"
#include "gtvseg/evalx/revision.hpp"
#include "gtvseg/evalx/summary.hpp"

using namespace gtvseg;
using namespace gtvseg::eval;

namespace {

Geometry unit_grid(int x, int y, int z) { return Geometry{{x, y, z}, {1, 1, 1}, {0, 0, 0}}; }

Mask cube(const Geometry& g, Index3 lo, int edge) {
  Mask m(g);
  for (int k = lo.z; k < lo.z + edge; ++k)
    for (int j = lo.y; j < lo.y + edge; ++j)
      for (int i = lo.x; i < lo.x + edge; ++i) m.at(i, j, k) = 1;
  return m;
}

}  // namespace

TEST_CASE("dsc basics and the shifted cube") {
  const auto g = unit_grid(12, 8, 8);
  const Mask a = cube(g, {1, 2, 2}, 4);
  CHECK(dsc(a, a) == 1.0);
  CHECK(dsc(a, cube(g, {6, 2, 2}, 4)) == 0.0);
  CHECK(dsc(a, cube(g, {3, 2, 2}, 4)) == 0.5);
  CHECK(dsc(Mask(g), Mask(g)) == 1.0);
  CHECK_THROWS_AS(dsc(a, Mask(unit_grid(4, 4, 4))), Error);
}

TEST_CASE("surface of a single voxel and of a solid 3x3x3 cube") {
  const auto g = unit_grid(5, 5, 5);
  Mask one(g);
  one.at(2, 2, 2) = 1;
  const auto s = surface(one);
  REQUIRE(s.size() == 1);
  CHECK(s[0] == Vec3{2, 2, 2});
  CHECK(surface(cube(g, {1, 1, 1}, 3)).size() == 26);
  CHECK(count_set(surface_mask(cube(g, {0, 0, 0}, 5))) == 98);
}

TEST_CASE("surface matches the neighbour-scan oracle on random masks") {
  Rng rng(11);
  for (int t = 0; t < 20; ++t) {
    const Geometry g{{2 + static_cast<int>(rng.below(8)), 2 + static_cast<int>(rng.below(8)),
                      2 + static_cast<int>(rng.below(8))},
                     {0.5 + rng.uniform(), 0.5 + rng.uniform(), 0.5 + 2 * rng.uniform()},
                     {rng.uniform(-5, 5), 0, 1}};
    const Mask m = oracle::random_mask(rng, g, rng.uniform(0.1, 0.9));
    const auto got = surface(m);
    const auto want = oracle::surface_points(m);
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) CHECK((got[i] - want[i]).norm() == 0.0);
  }
}

TEST_CASE("distance transform equals brute force with anisotropic spacing") {
  Rng rng(5);
  for (int t = 0; t < 10; ++t) {
    const Geometry g{{7, 5, 6}, {0.7, 1.3, 2.5}, {0, 0, 0}};
    const Mask m = oracle::random_mask(rng, g, 0.08);
    if (count_set(m) == 0) continue;
    const auto d = distance_transform(m);
    for (std::size_t n = 0; n < m.size(); ++n) {
      const Vec3 p = g.voxel_to_world(g.unravel(n));
      double best = INFINITY;
      for (std::size_t q = 0; q < m.size(); ++q) {
        if (m[q]) best = std::min(best, (p - g.voxel_to_world(g.unravel(q))).norm());
      }
      CHECK(d[n] == doctest::Approx(best).epsilon(1e-12));
    }
  }
  const auto empty = distance_transform(Mask(unit_grid(3, 3, 3)));
  CHECK(std::isinf(empty[0]));
}

TEST_CASE("hd95 and asd on identical and shifted cubes") {
  const auto g = unit_grid(16, 8, 8);
  const Mask a = cube(g, {2, 2, 2}, 4);
  const Mask b = cube(g, {5, 2, 2}, 4);
  CHECK(*hd95(a, a) == 0.0);
  CHECK(*asd(a, a) == 0.0);
  CHECK(*hd95(a, b) == doctest::Approx(*oracle::hd95_pooled(a, b)).epsilon(1e-12));
  CHECK(*asd(a, b) == doctest::Approx(*oracle::asd(a, b)).epsilon(1e-12));
  CHECK(*hd95(a, b) == *hd95(b, a));
  CHECK(*hd95(a, b, Hd95Mode::max_of_directed) ==
        doctest::Approx(*oracle::hd95_max(a, b)).epsilon(1e-12));
  const auto ab = directed_surface_distances(a, b);
  CHECK(*asd(a, b) <= *std::max_element(ab.begin(), ab.end()) + 1e-12);
  CHECK_FALSE(hd95(a, Mask(g)).has_value());
  CHECK_FALSE(asd(Mask(g), a).has_value());
}

TEST_CASE("percentile_linear interpolates sorted values") {
  CHECK(percentile_linear({3, 1, 2}, 0.5) == 2.0);
  CHECK(percentile_linear({0, 10}, 0.95) == doctest::Approx(9.5));
  CHECK(percentile_linear({4}, 0.95) == 4.0);
}

TEST_CASE("revision categories and slice fractions") {
  const auto g = unit_grid(8, 8, 12);
  Mask gt(g);
  for (int k = 1; k <= 10; ++k)
    for (int j = 2; j < 6; ++j)
      for (int i = 2; i < 6; ++i) gt.at(i, j, k) = 1;

  const Revision same = revision_degree(gt, gt);
  CHECK(same.category == RevisionCategory::none);
  CHECK(same.revised_fraction == 0.0);
  CHECK(same.relevant_slices == 10);
  CHECK_FALSE(is_unacceptable(gt, gt));

  // Correct on 8 of 10 slices, empty on 2.
  Mask pred = gt;
  for (int k : {3, 7})
    for (int j = 0; j < 8; ++j)
      for (int i = 0; i < 8; ++i) pred.at(i, j, k) = 0;
  const Revision r = revision_degree(pred, gt);
  CHECK(r.failing_slices == 2);
  CHECK(r.revised_fraction == doctest::Approx(0.2));
  CHECK(r.category == RevisionCategory::ge10_lt30);

  // Failing on 7 of 10 slices.
  Mask poor = gt;
  for (int k = 1; k <= 7; ++k)
    for (int j = 0; j < 8; ++j)
      for (int i = 0; i < 8; ++i) poor.at(i, j, k) = 0;
  CHECK(is_unacceptable(poor, gt));

  Mask elsewhere(g);
  elsewhere.at(0, 0, 5) = 1;
  const Revision miss = revision_degree(elsewhere, gt);
  CHECK(miss.no_overlap);
  CHECK(miss.category == RevisionCategory::unacceptable);
  CHECK(revision_degree(Mask(g), gt).category == RevisionCategory::unacceptable);
  CHECK_THROWS_AS(revision_degree(gt, Mask(g)), Error);
}

TEST_CASE("category bins at their edges") {
  CHECK(categorize(0.0) == RevisionCategory::none);
  CHECK(categorize(0.05) == RevisionCategory::lt10);
  CHECK(categorize(0.1) == RevisionCategory::ge10_lt30);
  CHECK(categorize(0.3) == RevisionCategory::ge30_le60);
  CHECK(categorize(0.6) == RevisionCategory::ge30_le60);
  CHECK(categorize(0.61) == RevisionCategory::unacceptable);
  for (auto c : kAllCategories) CHECK(parse_category(to_string(c)) == c);
}

TEST_CASE("adding correctly predicted slices never worsens the category") {
  const auto g = unit_grid(6, 6, 10);
  Mask gt(g), pred(g);
  for (int k = 0; k < 10; ++k)
    for (int j = 1; j < 5; ++j)
      for (int i = 1; i < 5; ++i) gt.at(i, j, k) = 1;
  pred.at(2, 2, 0) = 1;
  auto last = revision_degree(pred, gt).revised_fraction;
  for (int k = 0; k < 10; ++k) {
    for (int j = 1; j < 5; ++j)
      for (int i = 1; i < 5; ++i) pred.at(i, j, k) = 1;
    const double f = revision_degree(pred, gt).revised_fraction;
    CHECK(f <= last);
    last = f;
  }
  CHECK(last == 0.0);
}

TEST_CASE("volume coefficient of variation") {
  CHECK(volume_cov({5, 5, 5}) == 0.0);
  CHECK(volume_cov({1, 3}) == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-12));
  Rng rng(3);
  std::vector<double> v;
  for (int i = 0; i < 17; ++i) v.push_back(rng.uniform(10, 20));
  double mean = 0;
  for (double x : v) mean += x;
  mean /= v.size();
  double ss = 0;
  for (double x : v) ss += (x - mean) * (x - mean);
  CHECK(volume_cov(v) == doctest::Approx(std::sqrt(ss / (v.size() - 1)) / mean).epsilon(1e-12));
  CHECK_THROWS_AS(volume_cov({1}), Error);
  CHECK_THROWS_AS(volume_cov({-1, 1}), Error);
}

TEST_CASE("cohort summary matches hand aggregation") {
  std::vector<SegScores> s;
  Rng rng(9);
  for (int i = 0; i < 12; ++i) {
    SegScores x;
    x.case_id = "c" + std::to_string(i);
    x.variant = "v";
    x.dsc = rng.uniform(0.3, 0.95);
    x.hd95_mm = rng.uniform(1, 20);
    x.asd_mm = rng.uniform(0.5, 5);
    x.revised_fraction = rng.uniform(0, 1);
    x.category = categorize(x.revised_fraction);
    x.unacceptable = x.category == RevisionCategory::unacceptable;
    s.push_back(x);
  }
  const auto sum = cohort_summary(s);
  std::size_t bad = 0;
  double dsum = 0, hsum = 0;
  std::size_t ok = 0;
  for (const auto& x : s) {
    if (x.unacceptable) {
      ++bad;
      continue;
    }
    ++ok;
    dsum += x.dsc;
    hsum += *x.hd95_mm;
  }
  CHECK(sum.unacceptable == bad);
  CHECK(sum.unacceptable_pct == doctest::Approx(100.0 * bad / 12));
  CHECK(sum.dsc.n == ok);
  CHECK(sum.dsc.mean == doctest::Approx(dsum / ok).epsilon(1e-12));
  CHECK(sum.hd95.mean == doctest::Approx(hsum / ok).epsilon(1e-12));
  CHECK(*sum.dsc.ci_lo <= sum.dsc.mean);
  CHECK(*sum.dsc.ci_hi >= sum.dsc.mean);
  std::size_t total = 0;
  for (const auto& row : sum.by_category) total += row.count;
  CHECK(total == 12);
}

TEST_CASE("identical acceptable cases give a zero-width interval") {
  SegScores x;
  x.case_id = "a";
  x.variant = "v";
  x.dsc = 0.8;
  x.hd95_mm = 3;
  x.asd_mm = 1;
  const auto sum = cohort_summary({x, x, x});
  CHECK(sum.dsc.mean == doctest::Approx(0.8));
  CHECK(*sum.dsc.ci_lo == doctest::Approx(0.8));
  CHECK(*sum.dsc.ci_hi == doctest::Approx(0.8));
}

TEST_CASE("scores CSV round trip keeps undefined distances empty") {
  SegScores a{"case_000", "pct", 0.75, 4.5, 1.25, 0.2, RevisionCategory::ge10_lt30, false};
  SegScores b{"case_001", "pct", 0.0, std::nullopt, std::nullopt, 1.0, RevisionCategory::unacceptable, true};
  const std::string csv = scores_csv({a, b});
  CHECK(csv.rfind("case_id,variant,dsc,hd95_mm,asd_mm,revised_fraction,category,unacceptable\n", 0) == 0);
  CHECK(csv.find("case_001,pct,0,,,1,unacceptable,1") != std::string::npos);
  const auto back = parse_scores_csv(csv);
  REQUIRE(back.size() == 2);
  CHECK(back[0].dsc == 0.75);
  CHECK(*back[0].hd95_mm == 4.5);
  CHECK_FALSE(back[1].hd95_mm.has_value());
  CHECK(back[1].unacceptable);
  CHECK_THROWS_AS(parse_scores_csv("bad header\n"), Error);
}

TEST_CASE("report header names the interval method and the revision proxy") {
  const std::string h = eval::report_header();
  CHECK(h.find("t-based") != std::string::npos);
  CHECK(h.find("proxy") != std::string::npos);
  CHECK(h.find("slice DSC < 0.70") != std::string::npos);
  CHECK(eval::report_header(0.5).find("< 0.50") != std::string::npos);
}
